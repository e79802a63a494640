#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "gorlicz/field.hpp"

namespace gorlicz {

// PGM: grey levels map linearly onto [min, max], declared in a `# range <min> <max>`
// header comment (absent: [0, 1]); `# spacing <h>` records the grid spacing (absent: 1).
// A W x 1 image is a 1D field of W nodes.

struct PgmOptions {
  bool binary = true;  ///< P5 (true) or P2
  int maxval = 65535;  ///< 255 for 8-bit, up to 65535 for 16-bit
  /// Declared value range; defaults to [min, max] of the field.
  std::optional<double> lo, hi;
};

void write_pgm(std::ostream& out, const ScalarFieldd& u, const PgmOptions& opts = {});
void write_pgm(const std::string& path, const ScalarFieldd& u, const PgmOptions& opts = {});
/// `spacing` overrides the spacing comment.
ScalarFieldd read_pgm(std::istream& in, std::optional<double> spacing = std::nullopt);
ScalarFieldd read_pgm(const std::string& path, std::optional<double> spacing = std::nullopt);

// CSV: a `dims,h` header row (e.g. `256,0.0039` or `64x48,0.5`), then one value per line, x fastest.

void write_csv_field(std::ostream& out, const ScalarFieldd& u);
void write_csv_field(const std::string& path, const ScalarFieldd& u);
ScalarFieldd read_csv_field(std::istream& in);
ScalarFieldd read_csv_field(const std::string& path);

/// Dispatch on the extension: .pgm or .csv.
ScalarFieldd read_field(const std::string& path, std::optional<double> spacing = std::nullopt);
void write_field(const std::string& path, const ScalarFieldd& u, const PgmOptions& opts = {});

}  // namespace gorlicz
