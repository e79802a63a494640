#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gorlicz/grid.hpp"

namespace gorlicz {

// JSON run configuration; the grammar is documented in docs/config.md. Every optional key
// is kept optional so that serialising a parsed document reproduces exactly its keys.

enum class Command { CheckPhi, Solve, Sweep, Denoise };

std::string to_string(Command c);

/// A field: a number (constant), {"file": path}, or {"generator": name, ...parameters}.
struct FieldSource {
  std::optional<double> constant;
  std::optional<std::string> file;
  std::optional<std::string> generator;
  std::map<std::string, double> params;
  /// amplitude of additive uniform noise drawn from the run seed
  std::optional<double> noise;
};

struct GridSection {
  std::optional<long> nx, ny;
  std::optional<double> h, length;
};

struct PhiSection {
  std::string family;  ///< power | double_phase | variable_exponent
  std::optional<double> p, weight;
  std::optional<FieldSource> a, exponent;
  /// outer power applied before checking (check-phi only)
  std::optional<double> compose;
};

struct EnergySection {
  std::string kind;  ///< Fp | Ep | limit
  std::optional<double> p, r;
};

struct SolverSection {
  std::optional<std::string> method;  ///< smooth | primal_dual
  std::optional<long> max_iter, patience, max_backtracks, trace_stride;
  std::optional<double> tol, gtol, smoothing, armijo, backtrack, tau, sigma;
  std::optional<bool> random_init;
};

struct ScheduleSection {
  std::optional<std::vector<double>> p;
  std::optional<bool> warm_start, limit;
  std::optional<long> tail, threads;
  std::optional<double> gap_ratio, distance_ratio, slack;
};

struct ChecksSection {
  std::optional<double> inc, dec, t_min, t_max, tolerance_multiplier;
  std::optional<long> samples, beta_levels;
};

struct IoSection {
  std::optional<std::string> output, report, csv;
  std::optional<long> pgm_maxval;
  std::optional<bool> pgm_binary;
};

struct RunConfig {
  Command command = Command::CheckPhi;
  std::optional<std::uint64_t> seed;
  std::optional<GridSection> grid;
  std::optional<PhiSection> phi;
  std::optional<FieldSource> data;
  std::optional<EnergySection> energy;
  std::optional<SolverSection> solver, limit_solver;
  std::optional<ScheduleSection> schedule;
  std::optional<ChecksSection> checks;
  std::optional<IoSection> io;
  /// directory that relative file references resolve against (not serialised)
  std::string base_dir = ".";
};

/// Parses and validates a JSON document; throws UsageError with the offending key path.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
/// Serialises back to JSON (2-space indentation, keys in grammar order).
std::string serialize_config(const RunConfig& cfg);

/// Grid described by a grid section: h defaults to length / (nx - 1), length to 1.
Grid resolve_grid(const GridSection& g);

}  // namespace gorlicz
