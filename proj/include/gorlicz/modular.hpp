#pragma once

#include <cmath>
#include <limits>

#include "gorlicz/operators.hpp"
#include "gorlicz/phi.hpp"

namespace gorlicz {

/// Value of a modular in [0, +inf]; +inf marks a saturated (overflowed) sum.
template <typename Scalar>
class ModularValue {
 public:
  ModularValue() = default;
  explicit ModularValue(Scalar v) : value_(v) {}

  static ModularValue infinity() { return ModularValue(std::numeric_limits<Scalar>::infinity()); }

  Scalar value() const { return value_; }
  bool finite() const { return value_ < std::numeric_limits<Scalar>::infinity(); }

  friend bool operator<=(const ModularValue& a, Scalar b) { return a.value_ <= b; }
  friend bool operator>(const ModularValue& a, Scalar b) { return a.value_ > b; }

 private:
  Scalar value_ = Scalar(0);
};

namespace detail {

inline void require_phi_grid(const Grid* coefficients, const Grid& g) {
  if (coefficients && !(*coefficients == g)) throw UsageError("Phi-function coefficient grid does not match field grid");
}

// h^n * sum_x phi(x, scale * m_x), saturating at +inf.
template <typename Scalar, typename Derived>
ModularValue<Scalar> modular_of_magnitudes(const PhiFunction<Scalar>& phi, const Grid& g,
                                           const Eigen::MatrixBase<Derived>& magnitudes, Scalar scale = Scalar(1)) {
  Scalar sum(0);
  for (Index k = 0; k < magnitudes.size(); ++k) {
    const Scalar term = value(phi, k, scale * magnitudes[k]);
    sum += term;
    if (!(sum < std::numeric_limits<Scalar>::infinity())) return ModularValue<Scalar>::infinity();
  }
  const Scalar out = Scalar(g.cell_volume()) * sum;
  return std::isfinite(double(out)) ? ModularValue<Scalar>(out) : ModularValue<Scalar>::infinity();
}

}  // namespace detail

/// rho_phi(u) = h^n * sum_x phi(x, |u(x)|).
template <typename Scalar>
ModularValue<Scalar> modular(const PhiFunction<Scalar>& phi, const ScalarField<Scalar>& u) {
  detail::require_phi_grid(phi.coefficient_grid(), u.grid());
  return detail::modular_of_magnitudes(phi, u.grid(), u.values().cwiseAbs());
}

template <typename Scalar>
ModularValue<Scalar> modular(const PhiFunction<Scalar>& phi, const VectorField<Scalar>& v) {
  detail::require_phi_grid(phi.coefficient_grid(), v.grid());
  return detail::modular_of_magnitudes(phi, v.grid(), v.magnitude());
}

struct NormSettings {
  double tolerance = 1e-10;
  double expansion = 2.0;
};

/// inf { lambda > 0 : rho(lambda) <= 1 } for a modular rho(lambda) = rho_phi(u / lambda)
/// that is nonincreasing in lambda. Bisection from a geometric bracket around 1; the
/// returned value is the upper end of the final bracket, so rho(result) <= 1.
template <typename Scalar, typename Rho>
Scalar gauge_norm(Rho&& rho, const NormSettings& cfg = {}) {
  using std::max;
  if (!(cfg.tolerance > 0.0)) throw DomainError("norm tolerance must be positive");
  const Scalar grow(cfg.expansion);
  Scalar lo, hi;
  if (rho(Scalar(1)) <= Scalar(1)) {
    hi = Scalar(1);
    lo = hi / grow;
    while (rho(lo) <= Scalar(1)) {
      hi = lo;
      lo /= grow;
      if (!(lo > std::numeric_limits<Scalar>::min())) return Scalar(0);
    }
  } else {
    lo = Scalar(1);
    hi = grow;
    while (rho(hi) > Scalar(1)) {
      lo = hi;
      hi *= grow;
      if (!(hi < std::numeric_limits<Scalar>::max()))
        throw NumericalError("overflow while bracketing the Luxemburg norm", double(lo));
    }
  }
  const Scalar tol(cfg.tolerance);
  while (hi - lo > tol * max(Scalar(1), hi)) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (rho(mid) <= Scalar(1))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// Luxemburg norm ||u||_phi = inf { lambda > 0 : rho_phi(u / lambda) <= 1 }.
template <typename Scalar>
Scalar luxemburg_norm(const PhiFunction<Scalar>& phi, const ScalarField<Scalar>& u, const NormSettings& cfg = {}) {
  detail::require_phi_grid(phi.coefficient_grid(), u.grid());
  if (u.values().isZero(0)) return Scalar(0);
  const Vector<Scalar> m = u.values().cwiseAbs();
  return gauge_norm<Scalar>(
      [&](Scalar lambda) { return detail::modular_of_magnitudes(phi, u.grid(), m, Scalar(1) / lambda); }, cfg);
}

template <typename Scalar>
Scalar luxemburg_norm(const PhiFunction<Scalar>& phi, const VectorField<Scalar>& v, const NormSettings& cfg = {}) {
  detail::require_phi_grid(phi.coefficient_grid(), v.grid());
  const Vector<Scalar> m = v.magnitude();
  if (m.isZero(0)) return Scalar(0);
  return gauge_norm<Scalar>(
      [&](Scalar lambda) { return detail::modular_of_magnitudes(phi, v.grid(), m, Scalar(1) / lambda); }, cfg);
}

/// ||u||_{L^1} + ||grad u||_phi.
template <typename Scalar>
Scalar sobolev_norm(const PhiFunction<Scalar>& phi, const ScalarField<Scalar>& u, const NormSettings& cfg = {}) {
  return l1_norm(u) + luxemburg_norm(phi, gradient(u), cfg);
}

}  // namespace gorlicz
