#pragma once

// Property checks shared by the unit and acceptance suites. Each returns the
// number of violated instances together with a short description of the first.

#include <cmath>
#include <string>

#include "gorlicz/conditions.hpp"
#include "gorlicz/modular.hpp"
#include "test_support.hpp"

namespace gorlicz::testing {

struct Violations {
  long count = 0;
  long checked = 0;
  std::string first;

  void check(bool ok, const std::string& what) {
    ++checked;
    if (!ok) {
      if (count == 0) first = what;
      ++count;
    }
  }
  void merge(const Violations& o) {
    if (count == 0 && o.count > 0) first = o.first;
    count += o.count;
    checked += o.checked;
  }
};

/// Modular axioms (a)-(d), (e2), the unit-ball property and homogeneity of the
/// Luxemburg norm on `fields` random fields.
inline Violations modular_axioms(const PhiFunctiond& phi, const Grid& g, int fields, Rng& rng, double tol,
                                 bool convex = true) {
  Violations v;
  NormSettings ns;
  ns.tolerance = 1e-12;
  for (int i = 0; i < fields; ++i) {
    const double amp = std::exp(uniform(rng, std::log(0.05), std::log(5.0)));
    const auto u = random_field(g, rng, -amp, amp);
    const auto w = random_field(g, rng, -amp, amp);
    const double ru = modular(phi, u).value();
    const double rel = tol * std::max(1.0, ru);

    // (a) lambda -> rho(lambda u) nondecreasing on [0, 2]
    double prev = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double r = modular(phi, (0.1 * k) * u).value();
      v.check(r >= prev - tol * std::max(1.0, prev), "(a) monotone in lambda");
      prev = r;
    }
    // (b), (c)
    v.check(modular(phi, 0.0 * u).value() == 0.0, "(b) rho(0) = 0");
    v.check(std::abs(modular(phi, (-1.0) * u).value() - ru) <= rel, "(c) rho(-u) = rho(u)");
    // (d) convexity
    if (convex) {
      const double theta = uniform(rng, 0.0, 1.0);
      const double lhs = modular(phi, theta * u + (1 - theta) * w).value();
      const double rhs = theta * ru + (1 - theta) * modular(phi, w).value();
      v.check(lhs <= rhs + tol * std::max(1.0, rhs), "(d) convexity");
    }
    // (e2) rho(u) = 0 only for u = 0: a single nonzero node gives a positive modular
    ScalarFieldd spike(g, 0.0);
    spike[Index(uniform(rng, 0, double(g.size() - 1)))] = uniform(rng, 1e-3, 1.0);
    v.check(modular(phi, spike).value() > 0.0, "(e2) rho(u) = 0 implies u = 0");

    // unit ball and homogeneity
    const double n = luxemburg_norm(phi, u, ns);
    const double slack = 1e-8;
    if (n <= 1.0) v.check(ru <= 1.0 + slack, "unit ball: norm <= 1 => rho <= 1");
    if (ru <= 1.0) v.check(n <= 1.0 + slack, "unit ball: rho <= 1 => norm <= 1");
    v.check(modular(phi, (1.0 / (n * (1 + 1e-12))) * u).value() <= 1.0 + slack, "norm attains the unit ball");
    v.check(modular(phi, (1.0 / (n * (1 - 1e-6))) * u).value() > 1.0 - slack, "norm is minimal");
    const double c = uniform(rng, -4.0, 4.0);
    v.check(std::abs(luxemburg_norm(phi, c * u, ns) - std::abs(c) * n) <= tol * std::max(1.0, std::abs(c) * n),
            "homogeneity");
  }
  return v;
}

}  // namespace gorlicz::testing
