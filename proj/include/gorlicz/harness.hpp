#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gorlicz/solvers.hpp"

namespace gorlicz {

/// measure * (p - 1) * p^{-p/(p-1)}: the gap between phi and phi^p energies.
double young_correction(double p, double measure);

/// q = (r - 1) / (r - p), satisfying 1/q + r/q' = p.
double holder_exponent(double r, double p);

enum class SweepMethod { PrimalDual, Smooth };

std::string to_string(SweepMethod method);

/// Default p-schedule toward 1+.
std::vector<double> default_schedule();

/// Natural limit functional of a powered template: the double-phase and variable-exponent
/// Fp families map to their limit kinds, everything else to the same spec at p = 1.
EnergySpec limit_of(const EnergySpec& spec);

struct SweepConfig {
  EnergySpec spec;  ///< Ep or Fp template; its exponent is replaced by each scheduled p
  std::vector<double> schedule = default_schedule();
  /// Ep only: integrability exponent of u0, every scheduled p must be below it.
  std::optional<double> r;
  std::optional<EnergySpec> limit;
  SweepMethod method = SweepMethod::PrimalDual;
  SolverOpts opts;
  SolverOpts limit_opts;
  bool warm_start = true;
  /// Rows used by the tail predicates.
  int tail = 3;
  double gap_ratio = 0.05;
  /// Optional bound on the final distance relative to the data norm in the sweep topology.
  std::optional<double> distance_ratio;
  /// Relative slack for the liminf surrogate and the Young row bound.
  double slack = 1e-8;
  /// Worker threads for cold-start sweeps; 0 selects the hardware concurrency.
  int threads = 0;
  std::string output_path;

  explicit SweepConfig(EnergySpec s) : spec(std::move(s)) {}
  void validate() const;
};

struct SweepRow {
  double p = 0.0;
  double powered_energy = 0.0;
  double base_energy = 0.0;
  double young_correction = 0.0;
  std::optional<double> dist_l1;
  std::optional<double> dist_l2;
  int iterations = 0;
  bool converged = false;
  std::optional<ScalarFieldd> minimizer;
};

struct Predicate {
  std::string name;
  bool evaluated = false;
  bool passed = true;
  std::string detail;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::optional<SolveReport> limit;
  /// L2 for Fp sweeps, L1 for Ep sweeps.
  bool l2_topology = true;
  std::vector<Predicate> predicates;

  bool passed() const;
  std::optional<double> limit_energy() const;
  /// Distance of each row in the sweep topology.
  std::optional<double> distance(const SweepRow& row) const;
};

SweepReport run_sweep(const SweepConfig& cfg);

/// Recomputes the predicates from the rows (used by run_sweep).
std::vector<Predicate> evaluate_predicates(const SweepConfig& cfg, const SweepReport& report);

std::string sweep_csv(const SweepReport& report);
void write_sweep_csv(const SweepReport& report, const std::string& path);

}  // namespace gorlicz
