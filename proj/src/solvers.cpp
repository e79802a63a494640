#include "gorlicz/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gorlicz/operators.hpp"

namespace gorlicz {

std::string to_string(EnergyKind kind) {
  switch (kind) {
    case EnergyKind::Ep: return "Ep";
    case EnergyKind::Fp: return "Fp";
    case EnergyKind::LimitDoublePhase: return "limit_double_phase";
    case EnergyKind::LimitVarExp: return "limit_variable_exponent";
  }
  return "?";
}

EnergySpec::EnergySpec(EnergyKind kind, PhiFunctiond phi, double p, ScalarFieldd data)
    : kind_(kind), phi_(phi), integrand_(p == 1.0 ? phi : power_compose(phi, p)), p_(p), data_(std::move(data)) {
  if (const Grid* g = phi_.coefficient_grid(); g && !(*g == data_.grid()))
    throw UsageError("Phi-function coefficient grid does not match the data grid");
}

EnergySpec EnergySpec::dirichlet(PhiFunctiond phi, double p, ScalarFieldd u0) {
  if (!(p >= 1.0)) throw DomainError("Ep exponent must satisfy p >= 1");
  return EnergySpec(EnergyKind::Ep, std::move(phi), p, std::move(u0));
}

EnergySpec EnergySpec::fidelity(PhiFunctiond phi, double p, ScalarFieldd f) {
  if (!(p >= 1.0)) throw DomainError("Fp exponent must satisfy p >= 1");
  return EnergySpec(EnergyKind::Fp, std::move(phi), p, std::move(f));
}

EnergySpec EnergySpec::limit_double_phase(ScalarFieldd a, ScalarFieldd f) {
  require_same_grid(a.grid(), f.grid(), "double phase coefficient vs data");
  return EnergySpec(EnergyKind::LimitDoublePhase, PhiFunctiond::double_phase(std::move(a)), 1.0, std::move(f));
}

EnergySpec EnergySpec::limit_variable_exponent(ScalarFieldd exponent, ScalarFieldd f) {
  require_same_grid(exponent.grid(), f.grid(), "variable exponent vs data");
  if (!(exponent.min() >= 1.0)) throw DomainError("variable exponent must satisfy p(x) >= 1");
  std::vector<bool> mask(exponent.size());
  for (Index k = 0; k < exponent.size(); ++k) {
    mask[k] = exponent[k] <= 1.0 + kExponentOneThreshold;
    if (mask[k]) exponent[k] = 1.0;
  }
  EnergySpec spec(EnergyKind::LimitVarExp, PhiFunctiond::variable_exponent(std::move(exponent)), 1.0, std::move(f));
  spec.y_mask_ = std::move(mask);
  return spec;
}

EnergySpec EnergySpec::with_exponent(double p) const {
  if (is_limit()) throw UsageError("limit functionals carry no outer exponent");
  return kind_ == EnergyKind::Ep ? dirichlet(phi_, p, data_) : fidelity(phi_, p, data_);
}

namespace {

VectorFieldd spec_gradient(const EnergySpec& spec, const ScalarFieldd& u) {
  return spec.kind() == EnergyKind::Ep ? gradient(u, spec.data()) : gradient(u);
}

// psi'(|g|) g / |g|_eps per node; zero where |g|_eps = 0.
VectorFieldd flux(const EnergySpec& spec, const VectorFieldd& g, double eps) {
  VectorFieldd w(g.grid());
  const PhiFunctiond& psi = spec.integrand();
  for (Index k = 0; k < g.grid().size(); ++k) {
    const double r = g.values().row(k).norm();
    const double r_eps = std::sqrt(r * r + eps * eps);
    if (r_eps == 0.0) continue;
    w.values().row(k) = (detail::derivative(psi, k, r) / r_eps) * g.values().row(k);
  }
  return w;
}

// Riesz representative of the energy derivative in the h^n-weighted inner product.
Vector<double> descent_gradient(const EnergySpec& spec, const ScalarFieldd& u, double eps) {
  Vector<double> G = -divergence(flux(spec, spec_gradient(spec, u), eps)).values();
  if (spec.has_fidelity()) G += 2.0 * (u.values() - spec.data().values());
  if (spec.kind() == EnergyKind::Ep)
    for (Index k = 0; k < G.size(); ++k)
      if (spec.grid().on_boundary(k)) G[k] = 0.0;
  return G;
}

void require_grid(const EnergySpec& spec, const ScalarFieldd& u) { require_same_grid(spec.grid(), u.grid(), "energy"); }

}  // namespace

double energy(const EnergySpec& spec, const ScalarFieldd& u) {
  require_grid(spec, u);
  const Vector<double> r = spec_gradient(spec, u).magnitude();
  const PhiFunctiond& psi = spec.integrand();
  double sum = 0.0;
  for (Index k = 0; k < r.size(); ++k) sum += detail::value(psi, k, r[k]);
  if (spec.has_fidelity()) sum += (u.values() - spec.data().values()).squaredNorm();
  return spec.grid().cell_volume() * sum;
}

ScalarFieldd energy_gradient(const EnergySpec& spec, const ScalarFieldd& u, double smoothing) {
  require_grid(spec, u);
  if (!(smoothing >= 0.0)) throw DomainError("gradient smoothing must be nonnegative");
  return ScalarFieldd(u.grid(), (spec.grid().cell_volume() * descent_gradient(spec, u, smoothing)).eval());
}

double default_smoothing(const EnergySpec& spec) {
  const double range = spec.data().max() - spec.data().min();
  return 1e-6 * range / spec.grid().spacing();
}

StepPair default_steps(const Grid& grid) {
  const double s = grid.spacing() / (2.0 * std::sqrt(double(grid.dims())));
  return {s, s};
}

ScalarFieldd initial_field(const EnergySpec& spec, const SolverOpts& opts) {
  ScalarFieldd u = spec.data();
  if (opts.initial) {
    require_same_grid(opts.initial->grid(), spec.grid(), "initial field");
    u = *opts.initial;
  } else if (opts.random_init) {
    std::mt19937_64 rng(opts.seed);
    double lo = spec.data().min(), hi = spec.data().max();
    if (hi - lo <= 0.0) lo -= 1.0, hi += 1.0;
    std::uniform_real_distribution<double> dist(lo, hi);
    for (Index k = 0; k < u.size(); ++k) u[k] = dist(rng);
  }
  if (spec.kind() == EnergyKind::Ep)
    for (Index k = 0; k < u.size(); ++k)
      if (spec.grid().on_boundary(k)) u[k] = spec.data()[k];
  return u;
}

SolveReport solve_smooth(const EnergySpec& spec, const SolverOpts& opts) {
  if (spec.is_limit()) throw UsageError("solve_smooth handles Ep and Fp energies only");
  if (!(spec.exponent() > 1.0)) throw DomainError("solve_smooth requires p > 1");
  const double eps = opts.smoothing >= 0.0 ? opts.smoothing : default_smoothing(spec);
  const double w = spec.grid().cell_volume();

  SolveReport report;
  ScalarFieldd u = initial_field(spec, opts);
  double E = energy(spec, u);
  if (!std::isfinite(E)) throw NumericalError("non-finite energy at the initial field", E, 0);
  report.trace.push_back(E);

  Vector<double> G = descent_gradient(spec, u, eps);
  Vector<double> prev_u, prev_G;
  double step = 1.0;
  int quiet = 0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double g2 = w * G.squaredNorm();
    if (g2 == 0.0 || (opts.gtol > 0.0 && std::sqrt(g2) <= opts.gtol)) {
      report.converged = true;
      report.residual = std::sqrt(g2);
      break;
    }
    if (prev_u.size() > 0) {
      const Vector<double> s = u.values() - prev_u;
      const Vector<double> y = G - prev_G;
      const double sy = s.dot(y);
      step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * step;
    }
    double t = step;
    bool accepted = false;
    const double roundoff = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(E);
    ScalarFieldd trial = u;
    double E_trial = E;
    for (int b = 0; b < opts.max_backtracks; ++b) {
      trial.values() = u.values() - t * G;
      E_trial = energy(spec, trial);
      if (E_trial <= E - opts.armijo * t * g2 + roundoff) {
        accepted = true;
        break;
      }
      t *= opts.backtrack;
    }
    double decrease = 0.0;
    if (accepted) {
      if (!std::isfinite(E_trial)) throw NumericalError("non-finite energy in line search", E_trial, it);
      decrease = (E - E_trial) / std::max(std::abs(E_trial), std::numeric_limits<double>::min());
      prev_u = u.values();
      prev_G = G;
      u = std::move(trial);
      E = E_trial;
      step = t;
      G = descent_gradient(spec, u, eps);
      report.trace.push_back(E);
    } else {
      step = t;
    }
    if (opts.gtol > 0.0) continue;
    report.residual = decrease;
    quiet = decrease < opts.tol ? quiet + 1 : 0;
    if (quiet >= opts.patience) {
      report.converged = true;
      ++it;
      break;
    }
  }
  report.iterations = it;
  if (opts.gtol > 0.0) report.residual = std::sqrt(w) * G.norm();
  report.energy = energy(spec, u);
  report.minimizer = std::move(u);
  return report;
}

SolveReport solve_limit(const EnergySpec& spec, const SolverOpts& opts) {
  if (!spec.is_limit()) throw UsageError("solve_limit handles the limit functionals only");
  return solve_primal_dual(spec, opts);
}

SolveReport solve_primal_dual(const EnergySpec& spec, const SolverOpts& opts) {
  const Grid& grid = spec.grid();
  const StepPair defaults = default_steps(grid);
  const double tau = opts.tau > 0.0 ? opts.tau : defaults.tau;
  const double sigma = opts.sigma > 0.0 ? opts.sigma : defaults.sigma;
  if (tau * sigma * grid.gradient_norm_sq_bound() > 1.0 + 1e-12)
    throw UsageError("primal-dual steps violate tau * sigma * ||grad||^2 <= 1");

  const PhiFunctiond& psi = spec.integrand();
  const Index N = grid.size();
  const double w = grid.cell_volume();
  const bool dirichlet = spec.kind() == EnergyKind::Ep;
  const Vector<double>& f = spec.data().values();

  SolveReport report;
  ScalarFieldd u = initial_field(spec, opts);
  ScalarFieldd u_bar = u;
  VectorFieldd y(grid);
  report.trace.push_back(energy(spec, u));

  const double inv_sigma = 1.0 / sigma;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // dual: y <- prox_{sigma psi*}(y + sigma grad u_bar) = z - sigma prox_{psi/sigma}(z / sigma)
    const VectorFieldd y_old = y;
    y.values() += sigma * gradient(u_bar).values();
    for (Index k = 0; k < N; ++k) {
      const double m = y.values().row(k).norm();
      if (m == 0.0) continue;
      const double t = detail::prox_unchecked(psi, k, inv_sigma, m * inv_sigma);
      y.values().row(k) *= std::max(0.0, 1.0 - sigma * t / m);
    }

    // primal: u <- prox_{tau G}(u + tau div y)
    const Vector<double> u_old = u.values();
    Vector<double> v = u_old + tau * divergence(y).values();
    if (dirichlet) {
      for (Index k = 0; k < N; ++k)
        if (grid.on_boundary(k)) v[k] = f[k];
      u.values() = v;
    } else {
      u.values() = (v + 2.0 * tau * f) / (1.0 + 2.0 * tau);
    }
    u_bar.values() = 2.0 * u.values() - u_old;
    if (!u.values().allFinite()) throw NumericalError("non-finite primal iterate", 0.0, it);

    // residuals p = (u_old - u)/tau - K^T (y_old - y), d = (y_old - y)/sigma - K (u_old - u)
    const Vector<double> du = u_old - u.values();
    const ScalarFieldd du_field(grid, du);
    const VectorFieldd dy_field(grid, (y_old.values() - y.values()).eval());
    const Vector<double> p_res = du / tau + divergence(dy_field).values();
    const auto d_res = (dy_field.values() * inv_sigma - gradient(du_field).values()).eval();
    const double scale = std::max(1.0, std::sqrt(w) * u.values().norm());
    report.residual = std::sqrt(w) * (p_res.norm() + d_res.norm()) / scale;

    if ((it + 1) % std::max(1, opts.trace_stride) == 0) report.trace.push_back(energy(spec, u));
    if (report.residual < opts.tol) {
      report.converged = true;
      ++it;
      break;
    }
  }
  report.iterations = it;
  report.energy = energy(spec, u);
  if (!std::isfinite(report.energy)) throw NumericalError("non-finite energy at the primal-dual result", report.energy, it);
  report.trace.push_back(report.energy);
  report.minimizer = std::move(u);
  return report;
}

}  // namespace gorlicz
