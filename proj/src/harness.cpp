#include "gorlicz/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "gorlicz/errors.hpp"

namespace gorlicz {

double young_correction(double p, double measure) {
  if (!(p > 1.0)) throw DomainError("young_correction requires p > 1");
  if (!(measure > 0.0)) throw DomainError("young_correction requires a positive measure");
  const double conjugate = p / (p - 1.0);
  return measure * (p - 1.0) * std::exp(-conjugate * std::log(p));
}

double holder_exponent(double r, double p) {
  if (!(r > 1.0) || !(p > 1.0) || !(p < r)) throw DomainError("holder_exponent requires 1 < p < r");
  const double q = (r - 1.0) / (r - p);
  const double identity = 1.0 / q + r * (1.0 - 1.0 / q);
  if (std::abs(identity - p) > 1e-12 * std::max(1.0, p))
    throw NumericalError("Hoelder exponent identity violated", std::abs(identity - p), 0);
  return q;
}

std::string to_string(SweepMethod method) { return method == SweepMethod::Smooth ? "smooth" : "primal_dual"; }

std::vector<double> default_schedule() { return {1.5, 1.25, 1.1, 1.05, 1.02, 1.01}; }

EnergySpec limit_of(const EnergySpec& spec) {
  if (spec.is_limit()) return spec;
  if (spec.kind() == EnergyKind::Fp) {
    using Phi = PhiFunctiond;
    if (auto* dp = std::get_if<Phi::DoublePhase>(&spec.phi().family()))
      return EnergySpec::limit_double_phase(*dp->a, spec.data());
    if (auto* ve = std::get_if<Phi::VariableExponent>(&spec.phi().family()))
      return EnergySpec::limit_variable_exponent(*ve->p, spec.data());
  }
  return spec.with_exponent(1.0);
}

void SweepConfig::validate() const {
  if (spec.is_limit()) throw UsageError("sweep template must be an Ep or Fp energy");
  if (schedule.empty()) throw UsageError("sweep schedule is empty");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 1.0)) throw UsageError("sweep schedule entries must be > 1");
    if (k > 0 && !(schedule[k] < schedule[k - 1])) throw UsageError("sweep schedule must be strictly decreasing");
  }
  if (spec.kind() == EnergyKind::Ep) {
    if (!r) throw UsageError("Ep sweeps must record the integrability exponent r");
    if (!(*r > schedule.front())) throw UsageError("Ep sweeps need every scheduled p below r");
  }
  if (limit && !(limit->grid() == spec.grid())) throw UsageError("limit spec grid differs from the sweep grid");
  if (tail < 2) throw UsageError("sweep tail must cover at least 2 rows");
  if (!(gap_ratio >= 0.0) || !(slack >= 0.0)) throw UsageError("sweep ratios must be nonnegative");
  if (distance_ratio && !(*distance_ratio >= 0.0)) throw UsageError("distance ratio must be nonnegative");
  if (threads < 0) throw UsageError("thread count must be nonnegative");
}

bool SweepReport::passed() const {
  return std::all_of(predicates.begin(), predicates.end(), [](const Predicate& p) { return p.passed; });
}

std::optional<double> SweepReport::limit_energy() const {
  if (!limit) return std::nullopt;
  return limit->energy;
}

std::optional<double> SweepReport::distance(const SweepRow& row) const { return l2_topology ? row.dist_l2 : row.dist_l1; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SweepRow solve_row(const SweepConfig& cfg, double p, const SolverOpts& opts, const SolveReport* limit) {
  SweepRow row;
  row.p = p;
  row.young_correction = young_correction(p, cfg.spec.grid().quadrature_measure());
  const EnergySpec spec = cfg.spec.with_exponent(p);
  try {
    SolveReport r = cfg.method == SweepMethod::Smooth ? solve_smooth(spec, opts) : solve_primal_dual(spec, opts);
    row.powered_energy = r.energy;
    row.base_energy = energy(cfg.spec.with_exponent(1.0), r.minimizer);
    row.iterations = r.iterations;
    row.converged = r.converged;
    if (limit) {
      row.dist_l1 = l1_distance(r.minimizer, limit->minimizer);
      row.dist_l2 = l2_distance(r.minimizer, limit->minimizer);
    }
    row.minimizer = std::move(r.minimizer);
  } catch (const NumericalError& e) {
    row.powered_energy = row.base_energy = kNaN;
    row.iterations = e.iteration();
    row.converged = false;
  }
  return row;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<Predicate> evaluate_predicates(const SweepConfig& cfg, const SweepReport& report) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : report.rows)
    if (r.converged) rows.push_back(&r);
  std::vector<Predicate> out;

  Predicate young{"young_bound", true, true, ""};
  for (const auto* r : rows) {
    if (r->base_energy > r->powered_energy + r->young_correction + cfg.slack * std::max(1.0, r->powered_energy)) {
      young.passed = false;
      young.detail = "base > powered + correction at p=" + fmt(r->p);
      break;
    }
  }
  out.push_back(young);

  const auto limit_energy = report.limit_energy();
  const bool limit_ok = report.limit && report.limit->converged;
  Predicate liminf{"liminf", bool(report.limit), true, ""};
  Predicate gap{"energy_tail", bool(report.limit), true, ""};
  Predicate dist{"distance_tail", bool(report.limit), true, ""};
  if (report.limit && !limit_ok) {
    for (auto* p : {&liminf, &gap, &dist}) {
      p->passed = false;
      p->detail = "limit solve did not converge";
    }
  } else if (report.limit) {
    const double L = *limit_energy;
    const double abs_slack = cfg.slack * std::max(1.0, std::abs(L));
    for (const auto* r : rows) {
      if (r->base_energy < L - abs_slack) {
        liminf.passed = false;
        liminf.detail = "base energy below the limit energy at p=" + fmt(r->p);
        break;
      }
    }
    const std::size_t n = rows.size();
    const std::size_t first = n > std::size_t(cfg.tail) ? n - std::size_t(cfg.tail) : 0;
    if (n == 0) {
      gap.passed = dist.passed = false;
      gap.detail = dist.detail = "no converged rows";
    } else {
      for (std::size_t k = first + 1; k < n; ++k) {
        if (std::abs(rows[k]->powered_energy - L) > std::abs(rows[k - 1]->powered_energy - L) + abs_slack) {
          gap.passed = false;
          gap.detail = "energy gap increases at p=" + fmt(rows[k]->p);
        }
        if (*report.distance(*rows[k]) > *report.distance(*rows[k - 1])) {
          dist.passed = false;
          dist.detail = "distance increases at p=" + fmt(rows[k]->p);
        }
      }
      const double final_gap = std::abs(rows.back()->powered_energy - L);
      if (gap.passed && final_gap > cfg.gap_ratio * std::abs(L) + (L == 0.0 ? abs_slack : 0.0)) {
        gap.passed = false;
        gap.detail = "final relative gap " + fmt(final_gap / std::abs(L)) + " exceeds " + fmt(cfg.gap_ratio);
      }
      if (dist.passed && cfg.distance_ratio) {
        const auto& f = cfg.spec.data();
        const double bound = *cfg.distance_ratio * (report.l2_topology ? l2_norm(f) : l1_norm(f));
        if (*report.distance(*rows.back()) > bound) {
          dist.passed = false;
          dist.detail = "final distance " + fmt(*report.distance(*rows.back())) + " exceeds " + fmt(bound);
        }
      }
    }
  }
  for (auto* p : {&liminf, &gap, &dist})
    if (!p->evaluated) p->detail = "no limit functional";
  out.push_back(liminf);
  out.push_back(gap);
  out.push_back(dist);

  Predicate conv{"rows_converged", true, true, ""};
  if (rows.size() != report.rows.size()) {
    conv.passed = false;
    conv.detail = std::to_string(report.rows.size() - rows.size()) + " row(s) did not converge";
  }
  out.push_back(conv);
  return out;
}

SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepReport report;
  report.l2_topology = cfg.spec.kind() != EnergyKind::Ep;
  if (cfg.limit) report.limit = solve_primal_dual(*cfg.limit, cfg.limit_opts);
  const SolveReport* limit = report.limit ? &*report.limit : nullptr;

  const std::size_t n = cfg.schedule.size();
  report.rows.resize(n);
  if (cfg.warm_start) {
    SolverOpts opts = cfg.opts;
    for (std::size_t k = 0; k < n; ++k) {
      report.rows[k] = solve_row(cfg, cfg.schedule[k], opts, limit);
      if (report.rows[k].minimizer) opts.initial = report.rows[k].minimizer;
    }
  } else {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(n, cfg.threads > 0 ? std::size_t(cfg.threads) : hw);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) {
          try {
            report.rows[k] = solve_row(cfg, cfg.schedule[k], cfg.opts, limit);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  report.predicates = evaluate_predicates(cfg, report);
  if (!cfg.output_path.empty()) write_sweep_csv(report, cfg.output_path);
  return report;
}

std::string sweep_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "p,powered_energy,base_energy,young_correction,dist_l1,dist_l2,iterations,converged\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (const auto& r : report.rows) {
    out << fmt(r.p) << ',' << fmt(r.powered_energy) << ',' << fmt(r.base_energy) << ',' << fmt(r.young_correction)
        << ',' << opt(r.dist_l1) << ',' << opt(r.dist_l2) << ',' << r.iterations << ',' << (r.converged ? 1 : 0)
        << '\n';
  }
  if (report.limit) {
    const auto& L = *report.limit;
    out << "limit," << fmt(L.energy) << ',' << fmt(L.energy) << ",0,0,0," << L.iterations << ','
        << (L.converged ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_sweep_csv(const SweepReport& report, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << sweep_csv(report);
  if (!file) throw IoError("failed writing " + path);
}

}  // namespace gorlicz
