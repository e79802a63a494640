#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gorlicz/field.hpp"
#include "gorlicz/phi.hpp"

namespace gorlicz::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline ScalarFieldd random_field(const Grid& g, Rng& rng, double lo = -1.0, double hi = 1.0) {
  return ScalarFieldd::generate(g, [&](Index) { return uniform(rng, lo, hi); });
}

inline VectorFieldd random_vector_field(const Grid& g, Rng& rng, double lo = -1.0, double hi = 1.0) {
  VectorFieldd v(g);
  for (Index k = 0; k < v.values().size(); ++k) v.values().data()[k] = uniform(rng, lo, hi);
  return v;
}

/// Piecewise-linear interpolant of random knot values in [lo, hi] along x: Lipschitz by construction.
inline ScalarFieldd random_lipschitz(const Grid& g, Rng& rng, double lo, double hi, int knots = 6) {
  std::vector<double> kv(knots);
  for (double& v : kv) v = uniform(rng, lo, hi);
  const double length = g.spacing() * double(g.extent(0) - 1);
  return ScalarFieldd::generate(g, [&](Index k) {
    const double s = g.coordinate(k, 0) / length * (knots - 1);
    const int i = std::min(int(s), knots - 2);
    const double w = s - i;
    return (1 - w) * kv[i] + w * kv[i + 1];
  });
}

/// Smooth ramp p(x) from 1 (x <= x0) to 2 (x >= x1) along x.
inline ScalarFieldd exponent_ramp(const Grid& g, double x0 = 0.25, double x1 = 0.75) {
  const double length = g.spacing() * double(g.extent(0) - 1);
  return ScalarFieldd::generate(g, [&](Index k) {
    const double s = std::clamp((g.coordinate(k, 0) / length - x0) / (x1 - x0), 0.0, 1.0);
    return 1.0 + s * s * (3.0 - 2.0 * s);
  });
}

/// Built-in Phi-function corpus: power p in {1, 1.5, 2}, double phase with random
/// Lipschitz a in [0, 2], variable exponent in [1, 2]; each entry records the
/// aDec exponent it satisfies.
struct CorpusEntry {
  PhiFunctiond phi;
  double dec_exponent;
  std::string label;
};

inline std::vector<CorpusEntry> base_corpus(Rng& rng, const Grid& g) {
  std::vector<CorpusEntry> out;
  for (double p : {1.0, 1.5, 2.0}) out.push_back({PhiFunctiond::power(p), p, "power " + std::to_string(p)});
  for (int i = 0; i < 3; ++i)
    out.push_back({PhiFunctiond::double_phase(random_lipschitz(g, rng, 0.0, 2.0)), 2.0, "double phase"});
  out.push_back({PhiFunctiond::variable_exponent(exponent_ramp(g)), 2.0, "variable exponent ramp"});
  out.push_back(
      {PhiFunctiond::variable_exponent(random_lipschitz(g, rng, 1.0, 2.0)), 2.0, "variable exponent random"});
  return out;
}

}  // namespace gorlicz::testing
