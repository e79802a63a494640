#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gorlicz/field.hpp"
#include "gorlicz/phi.hpp"

namespace gorlicz {

enum class EnergyKind {
  Ep,                ///< h^n sum phi(x, |grad u|)^p with u = u0 on the boundary
  Fp,                ///< h^n sum phi(x, |grad u|)^p + |u - f|^2
  LimitDoublePhase,  ///< h^n sum |grad u| + a(x) |grad u|^2 + |u - f|^2
  LimitVarExp,       ///< h^n sum |grad u|^{p(x)} (|grad u| on Y = {p = 1}) + |u - f|^2
};

std::string to_string(EnergyKind kind);

/// Which discrete functional to minimise, with its data.
class EnergySpec {
 public:
  /// Nodes with p(x) <= 1 + this threshold form the set Y.
  static constexpr double kExponentOneThreshold = 1e-12;

  static EnergySpec dirichlet(PhiFunctiond phi, double p, ScalarFieldd u0);
  static EnergySpec fidelity(PhiFunctiond phi, double p, ScalarFieldd f);
  static EnergySpec limit_double_phase(ScalarFieldd a, ScalarFieldd f);
  static EnergySpec limit_variable_exponent(ScalarFieldd exponent, ScalarFieldd f);

  EnergyKind kind() const { return kind_; }
  const Grid& grid() const { return data_.grid(); }
  /// Outer power p (1 for the limit kinds).
  double exponent() const { return p_; }
  /// Base Phi-function (before the outer power).
  const PhiFunctiond& phi() const { return phi_; }
  /// Pointwise gradient integrand psi = phi^p.
  const PhiFunctiond& integrand() const { return integrand_; }
  /// u0 for Ep, f otherwise.
  const ScalarFieldd& data() const { return data_; }
  bool has_fidelity() const { return kind_ != EnergyKind::Ep; }
  bool is_limit() const { return kind_ == EnergyKind::LimitDoublePhase || kind_ == EnergyKind::LimitVarExp; }
  /// Y = {p(x) = 1} node mask (LimitVarExp only, empty otherwise).
  const std::vector<bool>& y_mask() const { return y_mask_; }

  /// Same functional family with another outer power (Ep/Fp only).
  EnergySpec with_exponent(double p) const;

 private:
  EnergySpec(EnergyKind kind, PhiFunctiond phi, double p, ScalarFieldd data);

  EnergyKind kind_;
  PhiFunctiond phi_;
  PhiFunctiond integrand_;
  double p_;
  ScalarFieldd data_;
  std::vector<bool> y_mask_;
};

struct SolverOpts {
  int max_iter = 20000;
  /// smooth solver: relative energy decrease threshold; primal-dual: residual threshold.
  double tol = 1e-10;
  /// consecutive sub-tolerance iterations required by the smooth solver.
  int patience = 5;
  /// smooth solver: when positive, stop once the weighted gradient norm drops to gtol
  /// instead of using the energy-decrease test.
  double gtol = 0.0;
  /// epsilon in |grad u|_eps; negative selects 1e-6 * range(data) / h.
  double smoothing = -1.0;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  /// primal-dual steps; non-positive selects h / (2 sqrt(n)).
  double tau = 0.0;
  double sigma = 0.0;
  /// energy is recorded every trace_stride primal-dual iterations.
  int trace_stride = 10;
  /// start from a uniform random field in the data range instead of the default.
  bool random_init = false;
  std::uint64_t seed = 0;
  /// explicit starting field (warm start); overrides the default and random_init.
  std::optional<ScalarFieldd> initial;
};

struct SolveReport {
  ScalarFieldd minimizer;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
  /// final relative energy decrease (smooth) or primal-dual residual.
  double residual = 0.0;
};

/// Discrete energy of u under spec (Ep uses the Dirichlet gradient with ghost values from u0).
double energy(const EnergySpec& spec, const ScalarFieldd& u);

/// Partial derivatives dE/du_k from the chain rule, with the flux direction
/// grad u / |grad u|_eps; zero on the Dirichlet boundary for Ep.
ScalarFieldd energy_gradient(const EnergySpec& spec, const ScalarFieldd& u, double smoothing);

double default_smoothing(const EnergySpec& spec);

struct StepPair {
  double tau;
  double sigma;
};
StepPair default_steps(const Grid& grid);

/// Gradient descent with Armijo backtracking (Barzilai-Borwein trial steps) for Ep/Fp, p > 1.
SolveReport solve_smooth(const EnergySpec& spec, const SolverOpts& opts = {});

/// First-order primal-dual iteration for the limit functionals.
SolveReport solve_limit(const EnergySpec& spec, const SolverOpts& opts = {});

/// The primal-dual iteration for any energy kind: dual prox of psi* through the
/// Moreau identity, closed-form fidelity prox (or boundary projection for Ep).
SolveReport solve_primal_dual(const EnergySpec& spec, const SolverOpts& opts = {});

/// Starting field used by the solvers for the given options.
ScalarFieldd initial_field(const EnergySpec& spec, const SolverOpts& opts);

}  // namespace gorlicz
