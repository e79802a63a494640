#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>

#include "gorlicz/config.hpp"
#include "gorlicz/field.hpp"
#include "gorlicz/phi.hpp"

namespace gorlicz {

enum ExitCode : int { kExitSuccess = 0, kExitPredicate = 1, kExitUsage = 2, kExitNumerical = 3 };

struct CliOptions {
  std::string config_path;
  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

/// Builds a field on grid g from its config description; noise and the uniform generator
/// draw from rng, file references resolve against base_dir.
ScalarFieldd build_field(const FieldSource& src, const Grid& g, std::mt19937_64& rng, const std::string& base_dir);

/// Coefficient fields live on g; a null grid is allowed only for constant coefficients.
PhiFunctiond build_phi(const PhiSection& phi, const Grid* g, std::mt19937_64& rng, const std::string& base_dir);

/// Runs one configured command, writing artifacts under output_dir; exceptions propagate.
int run_command(const RunConfig& cfg, const CliOptions& opts, std::ostream& out);

/// Loads the config, runs it and maps failures onto exit codes (messages go to err).
int run_cli(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace gorlicz
