#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <type_traits>
#include <variant>

#include "gorlicz/errors.hpp"
#include "gorlicz/field.hpp"

namespace gorlicz {

/// Spatially varying weak Phi-function phi(x, t), x ranging over grid nodes.
///
/// Four families are built in:
///   power              phi(x, t) = w t^p                  (p >= 1, w > 0)
///   double phase       phi(x, t) = t + a(x) t^2           (a >= 0)
///   variable exponent  phi(x, t) = t^{p(x)}               (p(x) >= 1)
///   power composition  phi(x, t) = base(x, t)^p           (p >= 1)
/// Values are immutable; coefficient fields are shared between copies.
template <typename Scalar>
class PhiFunction {
 public:
  struct Power {
    Scalar exponent;
    Scalar weight;
  };
  struct DoublePhase {
    std::shared_ptr<const ScalarField<Scalar>> a;
  };
  struct VariableExponent {
    std::shared_ptr<const ScalarField<Scalar>> p;
  };
  struct PowerCompose {
    std::shared_ptr<const PhiFunction> base;
    Scalar exponent;
  };
  using Family = std::variant<Power, DoublePhase, VariableExponent, PowerCompose>;

  static PhiFunction power(Scalar p, Scalar weight = Scalar(1)) {
    if (!(p >= Scalar(1))) throw DomainError("power exponent must be >= 1");
    if (!(weight > Scalar(0))) throw DomainError("power weight must be positive");
    return PhiFunction(Power{p, weight});
  }

  static PhiFunction double_phase(ScalarField<Scalar> a) {
    if (a.size() > 0 && !(a.min() >= Scalar(0))) throw DomainError("double phase coefficient must satisfy a >= 0");
    return PhiFunction(DoublePhase{std::make_shared<const ScalarField<Scalar>>(std::move(a))});
  }

  static PhiFunction variable_exponent(ScalarField<Scalar> p) {
    if (p.size() > 0 && !(p.min() >= Scalar(1))) throw DomainError("variable exponent must satisfy p(x) >= 1");
    return PhiFunction(VariableExponent{std::make_shared<const ScalarField<Scalar>>(std::move(p))});
  }

  const Family& family() const { return family_; }

  template <typename F>
  bool holds() const {
    return std::holds_alternative<F>(family_);
  }

  /// Grid of the spatial coefficient, or nullptr for the x-independent power family.
  const Grid* coefficient_grid() const {
    return std::visit(
        [](const auto& f) -> const Grid* {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Power>)
            return nullptr;
          else if constexpr (std::is_same_v<T, DoublePhase>)
            return &f.a->grid();
          else if constexpr (std::is_same_v<T, VariableExponent>)
            return &f.p->grid();
          else
            return f.base->coefficient_grid();
        },
        family_);
  }

  /// Number of distinct nodes the function varies over (1 when x-independent).
  Index node_count() const {
    const Grid* g = coefficient_grid();
    return g ? g->size() : 1;
  }

  std::string name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Power>)
            return "power";
          else if constexpr (std::is_same_v<T, DoublePhase>)
            return "double_phase";
          else if constexpr (std::is_same_v<T, VariableExponent>)
            return "variable_exponent";
          else
            return "power_compose(" + f.base->name() + ")";
        },
        family_);
  }

  explicit PhiFunction(Family family) : family_(std::move(family)) {}

 private:
  Family family_;
};

using PhiFunctiond = PhiFunction<double>;

template <typename Scalar>
PhiFunction<Scalar> power_compose(const PhiFunction<Scalar>& phi, Scalar p) {
  if (!(p >= Scalar(1))) throw DomainError("power_compose exponent must be >= 1");
  using PC = typename PhiFunction<Scalar>::PowerCompose;
  return PhiFunction<Scalar>(PC{std::make_shared<const PhiFunction<Scalar>>(phi), p});
}

namespace detail {

template <typename Scalar>
Scalar pow_nonneg(Scalar t, Scalar p) {
  using std::pow;
  if (p == Scalar(1)) return t;
  if (p == Scalar(2)) return t * t;
  return pow(t, p);
}

// d/dt t^p on [0, inf), right derivative at 0.
template <typename Scalar>
Scalar dpow(Scalar t, Scalar p) {
  if (p == Scalar(1)) return Scalar(1);
  if (t == Scalar(0)) return Scalar(0);
  return p * pow_nonneg(t, p - Scalar(1));
}

template <typename Scalar>
Scalar d2pow(Scalar t, Scalar p) {
  if (p == Scalar(1)) return Scalar(0);
  if (p == Scalar(2)) return Scalar(2);
  if (t == Scalar(0)) return p < Scalar(2) ? std::numeric_limits<Scalar>::infinity() : Scalar(0);
  return p * (p - Scalar(1)) * pow_nonneg(t, p - Scalar(2));
}

// Unchecked evaluation; hot loops in modular/solvers call these directly.
template <typename Scalar>
Scalar value(const PhiFunction<Scalar>& phi, Index node, Scalar t) {
  using Phi = PhiFunction<Scalar>;
  return std::visit(
      [&](const auto& f) -> Scalar {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, typename Phi::Power>)
          return f.weight * pow_nonneg(t, f.exponent);
        else if constexpr (std::is_same_v<T, typename Phi::DoublePhase>)
          return t + (*f.a)[node] * t * t;
        else if constexpr (std::is_same_v<T, typename Phi::VariableExponent>)
          return pow_nonneg(t, (*f.p)[node]);
        else
          return pow_nonneg(value(*f.base, node, t), f.exponent);
      },
      phi.family());
}

template <typename Scalar>
Scalar derivative(const PhiFunction<Scalar>& phi, Index node, Scalar t) {
  using Phi = PhiFunction<Scalar>;
  return std::visit(
      [&](const auto& f) -> Scalar {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, typename Phi::Power>)
          return f.weight * dpow(t, f.exponent);
        else if constexpr (std::is_same_v<T, typename Phi::DoublePhase>)
          return Scalar(1) + Scalar(2) * (*f.a)[node] * t;
        else if constexpr (std::is_same_v<T, typename Phi::VariableExponent>)
          return dpow(t, (*f.p)[node]);
        else
          return dpow(value(*f.base, node, t), f.exponent) * derivative(*f.base, node, t);
      },
      phi.family());
}

template <typename Scalar>
Scalar second_derivative(const PhiFunction<Scalar>& phi, Index node, Scalar t) {
  using Phi = PhiFunction<Scalar>;
  return std::visit(
      [&](const auto& f) -> Scalar {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, typename Phi::Power>)
          return f.weight * d2pow(t, f.exponent);
        else if constexpr (std::is_same_v<T, typename Phi::DoublePhase>)
          return Scalar(2) * (*f.a)[node];
        else if constexpr (std::is_same_v<T, typename Phi::VariableExponent>)
          return d2pow(t, (*f.p)[node]);
        else {
          const Scalar b = value(*f.base, node, t);
          const Scalar db = derivative(*f.base, node, t);
          const Scalar d2b = second_derivative(*f.base, node, t);
          return d2pow(b, f.exponent) * db * db + dpow(b, f.exponent) * d2b;
        }
      },
      phi.family());
}

template <typename Scalar>
void check_arguments(const PhiFunction<Scalar>& phi, Index node, Scalar t) {
  if (!(t >= Scalar(0))) throw DomainError("Phi-function argument must satisfy t >= 0");
  const Grid* g = phi.coefficient_grid();
  if (node < 0 || (g && node >= g->size())) throw IndexError("node index out of range");
}

}  // namespace detail

template <typename Scalar>
Scalar eval(const PhiFunction<Scalar>& phi, Index node, Scalar t) {
  detail::check_arguments(phi, node, t);
  return detail::value(phi, node, t);
}

/// Right derivative in t.
template <typename Scalar>
Scalar deriv(const PhiFunction<Scalar>& phi, Index node, Scalar t) {
  detail::check_arguments(phi, node, t);
  return detail::derivative(phi, node, t);
}

/// Second derivative in t (+inf at t = 0 for exponents in (1, 2)).
template <typename Scalar>
Scalar deriv2(const PhiFunction<Scalar>& phi, Index node, Scalar t) {
  detail::check_arguments(phi, node, t);
  return detail::second_derivative(phi, node, t);
}

/// True where phi(x, .) is exactly linear (power or variable exponent equal to 1).
template <typename Scalar>
bool is_linear_at(const PhiFunction<Scalar>& phi, Index node) {
  using Phi = PhiFunction<Scalar>;
  if (auto* f = std::get_if<typename Phi::Power>(&phi.family())) return f->exponent == Scalar(1);
  if (auto* f = std::get_if<typename Phi::VariableExponent>(&phi.family())) return (*f->p)[node] == Scalar(1);
  return false;
}

struct ProxSettings {
  int newton_iterations = 100;
  int bisection_iterations = 2000;
  double tolerance = 1e-12;
};

namespace detail {

template <typename Scalar>
Scalar prox_unchecked(const PhiFunction<Scalar>& phi, Index node, Scalar tau, Scalar s,
                      const ProxSettings& cfg = {}) {
  using Phi = PhiFunction<Scalar>;
  using std::abs;
  using std::max;
  const Scalar d0 = derivative(phi, node, Scalar(0));
  if (s <= tau * d0) return Scalar(0);

  if (auto* f = std::get_if<typename Phi::DoublePhase>(&phi.family()))
    return max(Scalar(0), (s - tau) / (Scalar(1) + Scalar(2) * (*f->a)[node] * tau));
  if (is_linear_at(phi, node)) return s - tau * d0;

  // Root of g(t) = phi'(t) + (t - s) / tau on (0, s]; g is increasing,
  // g(0) < 0 and g(s) >= 0.
  const auto g = [&](Scalar t) { return derivative(phi, node, t) + (t - s) / tau; };
  const Scalar tol(cfg.tolerance);
  Scalar lo(0), hi = s;
  Scalar t = s;
  for (int it = 0; it < cfg.newton_iterations; ++it) {
    const Scalar gt = g(t);
    if (gt == Scalar(0)) return t;
    if (gt < Scalar(0))
      lo = t;
    else
      hi = t;
    const Scalar dg = second_derivative(phi, node, t) + Scalar(1) / tau;
    Scalar next = t - gt / dg;
    if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
    const Scalar step = abs(next - t);
    t = next;
    if (step <= tol * max(Scalar(1), t) || hi - lo <= tol * max(Scalar(1), hi)) return t;
  }
  for (int it = 0; it < cfg.bisection_iterations; ++it) {
    if (hi - lo <= tol * max(Scalar(1), hi)) return Scalar(0.5) * (lo + hi);
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (g(mid) < Scalar(0))
      lo = mid;
    else
      hi = mid;
  }
  const Scalar mid = Scalar(0.5) * (lo + hi);
  throw NumericalError("prox root finding did not converge", double(abs(g(mid))), cfg.newton_iterations);
}

}  // namespace detail

/// argmin_{t >= 0} phi(x, t) + (t - s)^2 / (2 tau).
template <typename Scalar>
Scalar prox(const PhiFunction<Scalar>& phi, Index node, Scalar tau, Scalar s, const ProxSettings& cfg = {}) {
  if (!(tau > Scalar(0))) throw DomainError("prox step tau must be positive");
  detail::check_arguments(phi, node, Scalar(0));
  return detail::prox_unchecked(phi, node, tau, s, cfg);
}

}  // namespace gorlicz
