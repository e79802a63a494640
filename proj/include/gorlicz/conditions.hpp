#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gorlicz/phi.hpp"

namespace gorlicz {

enum class Condition { A0, aInc, aDec };

inline std::string to_string(Condition c) {
  switch (c) {
    case Condition::A0: return "A0";
    case Condition::aInc: return "aInc";
    case Condition::aDec: return "aDec";
  }
  return "?";
}

/// Node and t-pair where a sampled condition is worst (or fails).
struct FailureSample {
  Index node = 0;
  double t1 = 0.0;
  double t2 = 0.0;
};

/// Outcome of a sampled condition check. For A0 the witness is the beta found;
/// for aInc/aDec it is the least sampled almost-monotonicity constant L.
struct ConditionReport {
  Condition condition = Condition::A0;
  double exponent = 0.0;
  bool holds = false;
  double witness_constant = 0.0;
  std::optional<FailureSample> failure_sample;

  std::string label() const {
    if (condition == Condition::A0) return "A0";
    return to_string(condition) + "(" + std::to_string(exponent) + ")";
  }
};

/// Log-spaced sample points in [t_min, t_max].
inline std::vector<double> log_samples(double t_min = 1e-6, double t_max = 1e6, int count = 200) {
  if (!(t_min > 0.0) || !(t_max >= t_min)) throw DomainError("sample range must satisfy 0 < t_min <= t_max");
  if (count < 2) return {t_min};
  std::vector<double> out(count);
  const double a = std::log(t_min), b = std::log(t_max);
  for (int k = 0; k < count; ++k) out[k] = std::exp(a + (b - a) * k / (count - 1));
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

/// Geometric candidate grid {1, 1/2, ..., 2^-levels}.
inline std::vector<double> default_beta_candidates(int levels = 20) {
  std::vector<double> out;
  for (int k = 0; k <= levels; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

struct ConditionSettings {
  /// holds iff the sampled L is <= this multiplier.
  double tolerance_multiplier = 1.0 + 1e-10;
  /// relative slack on the A0 inequalities, absorbing rounding in phi(x, beta).
  double a0_slack = 1e-12;
};

/// (A0): largest candidate beta with phi(x, beta) <= 1 <= phi(x, 1/beta) at every node.
template <typename Scalar>
ConditionReport check_A0(const PhiFunction<Scalar>& phi, std::vector<double> candidates,
                         const ConditionSettings& cfg = {}) {
  if (candidates.empty()) throw UsageError("check_A0 needs at least one beta candidate");
  for (double b : candidates)
    if (!(b > 0.0 && b <= 1.0)) throw DomainError("beta candidates must lie in (0, 1]");
  std::sort(candidates.begin(), candidates.end(), std::greater<>());

  ConditionReport report;
  report.condition = Condition::A0;
  const double upper = 1.0 + cfg.a0_slack, lower = 1.0 - cfg.a0_slack;
  for (double beta : candidates) {
    std::optional<FailureSample> bad;
    for (Index x = 0; x < phi.node_count() && !bad; ++x) {
      const double lo = double(detail::value(phi, x, Scalar(beta)));
      const double hi = double(detail::value(phi, x, Scalar(1.0 / beta)));
      if (!(lo <= upper && hi >= lower)) bad = FailureSample{x, beta, 1.0 / beta};
    }
    if (!bad) {
      report.holds = true;
      report.witness_constant = beta;
      report.failure_sample.reset();
      return report;
    }
    report.failure_sample = bad;
  }
  report.holds = false;
  report.witness_constant = candidates.back();
  return report;
}

template <typename Scalar>
ConditionReport check_A0(const PhiFunction<Scalar>& phi, const ConditionSettings& cfg = {}) {
  return check_A0(phi, default_beta_candidates(), cfg);
}

namespace detail {

// Least L with r(s) <= L r(t) (increasing) or r(t) <= L r(s) (decreasing) over
// sampled s <= t, where r(t) = phi(x, t) / t^e. Computed in log space.
template <typename Scalar>
ConditionReport almost_monotone(const PhiFunction<Scalar>& phi, double e, std::vector<double> samples,
                                bool increasing, const ConditionSettings& cfg) {
  if (!(e > 0.0)) throw DomainError("growth exponent must be positive");
  if (samples.empty()) throw UsageError("condition check needs at least one sample");
  for (double t : samples)
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("sample values must be positive and finite");
  std::sort(samples.begin(), samples.end());

  ConditionReport report;
  report.condition = increasing ? Condition::aInc : Condition::aDec;
  report.exponent = e;
  double worst = 0.0;
  FailureSample where{};
  std::vector<double> log_ratio(samples.size());
  for (Index x = 0; x < phi.node_count(); ++x) {
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double t = samples[k];
      const double v = double(detail::value(phi, x, Scalar(t)));
      const double direct = v / std::pow(t, e);
      log_ratio[k] = (std::isfinite(direct) && direct > 0.0) ? std::log(direct) : std::log(v) - e * std::log(t);
    }
    // running extremum over s <= t
    std::size_t arg = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (increasing ? log_ratio[k] > log_ratio[arg] : log_ratio[k] < log_ratio[arg]) arg = k;
      const double gap = increasing ? log_ratio[arg] - log_ratio[k] : log_ratio[k] - log_ratio[arg];
      if (std::isnan(gap) || gap > worst) {
        worst = std::isnan(gap) ? std::numeric_limits<double>::infinity() : gap;
        where = FailureSample{x, samples[arg], samples[k]};
      }
    }
  }
  report.witness_constant = std::exp(worst);
  report.holds = report.witness_constant <= cfg.tolerance_multiplier;
  if (!report.holds) report.failure_sample = where;
  return report;
}

}  // namespace detail

/// (aInc)_p: t -> phi(x, t) / t^p is L-almost increasing; reports the sampled least L.
template <typename Scalar>
ConditionReport check_aInc(const PhiFunction<Scalar>& phi, double p,
                           const std::vector<double>& samples = log_samples(), const ConditionSettings& cfg = {}) {
  return detail::almost_monotone(phi, p, samples, true, cfg);
}

/// (aDec)_q: t -> phi(x, t) / t^q is L-almost decreasing.
template <typename Scalar>
ConditionReport check_aDec(const PhiFunction<Scalar>& phi, double q,
                           const std::vector<double>& samples = log_samples(), const ConditionSettings& cfg = {}) {
  return detail::almost_monotone(phi, q, samples, false, cfg);
}

}  // namespace gorlicz
