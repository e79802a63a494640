#include "gorlicz/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gorlicz/conditions.hpp"
#include "gorlicz/errors.hpp"
#include "gorlicz/harness.hpp"
#include "gorlicz/io.hpp"
#include "gorlicz/solvers.hpp"

namespace gorlicz {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string resolve(const std::string& base, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base) / p).string();
}

double param(const FieldSource& src, const char* key, double fallback) {
  const auto it = src.params.find(key);
  return it == src.params.end() ? fallback : it->second;
}

double normalized(const Grid& g, Index k, int axis) {
  return g.coordinate(k, axis) / (g.spacing() * double(g.extent(axis) - 1));
}

ScalarFieldd generate(const FieldSource& src, const Grid& g, std::mt19937_64& rng) {
  const std::string& name = *src.generator;
  if (name == "constant") return ScalarFieldd(g, param(src, "value", 0.0));
  if (name == "step") {
    const double lo = param(src, "low", 0.0), hi = param(src, "high", 1.0), at = param(src, "at", 0.5);
    return ScalarFieldd::generate(g, [&](Index k) { return normalized(g, k, 0) >= at ? hi : lo; });
  }
  if (name == "affine") {
    const double c = param(src, "offset", 0.0), m = param(src, "slope", 1.0);
    return ScalarFieldd::generate(g, [&](Index k) { return c + m * normalized(g, k, 0); });
  }
  if (name == "smoothstep") {
    const double from = param(src, "from", 1.0), to = param(src, "to", 2.0);
    const double x0 = param(src, "x0", 0.25), x1 = param(src, "x1", 0.75);
    if (!(x1 > x0)) throw UsageError("smoothstep generator needs x1 > x0");
    return ScalarFieldd::generate(g, [&](Index k) {
      const double s = std::clamp((normalized(g, k, 0) - x0) / (x1 - x0), 0.0, 1.0);
      return from + (to - from) * s * s * (3.0 - 2.0 * s);
    });
  }
  if (name == "vee") {
    const double base = param(src, "base", 0.0), slope = param(src, "slope", 1.0), c = param(src, "center", 0.5);
    return ScalarFieldd::generate(g, [&](Index k) { return base + slope * std::abs(normalized(g, k, 0) - c); });
  }
  if (name == "uniform") {
    std::uniform_real_distribution<double> dist(param(src, "low", 0.0), param(src, "high", 1.0));
    ScalarFieldd u(g, 0.0);
    for (Index k = 0; k < u.size(); ++k) u[k] = dist(rng);
    return u;
  }
  if (name == "disk") {
    const double lo = param(src, "low", 0.0), hi = param(src, "high", 1.0), r = param(src, "radius", 0.3);
    const double cx = param(src, "cx", 0.5), cy = param(src, "cy", 0.5);
    return ScalarFieldd::generate(g, [&](Index k) {
      const double dx = normalized(g, k, 0) - cx;
      const double dy = g.dims() == 2 ? normalized(g, k, 1) - cy : 0.0;
      return dx * dx + dy * dy <= r * r ? hi : lo;
    });
  }
  throw UsageError("unknown generator '" + name + "'");
}

bool needs_grid(const FieldSource& src) { return !src.constant; }

/// Smallest q with phi in aDec_q for the built-in families.
double natural_dec_exponent(const PhiFunctiond& phi) {
  using Phi = PhiFunctiond;
  if (auto* f = std::get_if<Phi::Power>(&phi.family())) return f->exponent;
  if (std::holds_alternative<Phi::DoublePhase>(phi.family())) return 2.0;
  if (auto* f = std::get_if<Phi::VariableExponent>(&phi.family())) return f->p->max();
  const auto& pc = std::get<Phi::PowerCompose>(phi.family());
  return pc.exponent * natural_dec_exponent(*pc.base);
}

constexpr double kPrimalDualTol = 1e-6;
constexpr double kDenoiseTol = 1e-5;
constexpr int kPrimalDualMaxIter = 100000;

SolverOpts solver_opts(const std::optional<SolverSection>& s, std::uint64_t seed, bool primal_dual,
                       double pd_tol = kPrimalDualTol) {
  SolverOpts o;
  o.seed = seed;
  if (primal_dual) {
    o.tol = pd_tol;
    o.max_iter = kPrimalDualMaxIter;
  }
  if (!s) return o;
  if (s->max_iter) o.max_iter = int(*s->max_iter);
  if (s->patience) o.patience = int(*s->patience);
  if (s->max_backtracks) o.max_backtracks = int(*s->max_backtracks);
  if (s->trace_stride) o.trace_stride = int(*s->trace_stride);
  if (s->tol) o.tol = *s->tol;
  if (s->gtol) o.gtol = *s->gtol;
  if (s->smoothing) o.smoothing = *s->smoothing;
  if (s->armijo) o.armijo = *s->armijo;
  if (s->backtrack) o.backtrack = *s->backtrack;
  if (s->tau) o.tau = *s->tau;
  if (s->sigma) o.sigma = *s->sigma;
  if (s->random_init) o.random_init = *s->random_init;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << text;
  if (!file) throw IoError("failed writing " + path);
}

struct Problem {
  Grid grid;
  PhiFunctiond phi;
  ScalarFieldd data;
};

Problem build_problem(const RunConfig& cfg, std::mt19937_64& rng) {
  std::optional<ScalarFieldd> from_file;
  if (cfg.data && cfg.data->file) {
    const auto h = cfg.grid ? cfg.grid->h : std::nullopt;
    from_file = read_field(resolve(cfg.base_dir, *cfg.data->file), h);
  }
  const Grid grid = from_file ? from_file->grid() : resolve_grid(*cfg.grid);
  PhiSection phi_section;
  if (cfg.phi) {
    phi_section = *cfg.phi;
  } else {
    phi_section.family = "double_phase";
    phi_section.a = FieldSource{0.0, {}, {}, {}, {}};
  }
  PhiFunctiond phi = build_phi(phi_section, &grid, rng, cfg.base_dir);
  ScalarFieldd data = build_field(*cfg.data, grid, rng, cfg.base_dir);
  return {grid, std::move(phi), std::move(data)};
}

std::string solve_report_csv(const EnergySpec& spec, const SolveReport& r, double data_energy) {
  std::ostringstream out;
  out << "kind,p,energy,data_energy,iterations,converged,residual\n"
      << to_string(spec.kind()) << ',' << fmt(spec.exponent()) << ',' << fmt(r.energy) << ',' << fmt(data_energy)
      << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << fmt(r.residual) << '\n';
  return out.str();
}

PgmOptions pgm_options(const RunConfig& cfg) {
  PgmOptions o;
  if (cfg.io && cfg.io->pgm_maxval) o.maxval = int(*cfg.io->pgm_maxval);
  if (cfg.io && cfg.io->pgm_binary) o.binary = *cfg.io->pgm_binary;
  return o;
}

std::string io_name(const std::optional<std::string> IoSection::*member, const RunConfig& cfg,
                    const std::string& fallback) {
  return cfg.io && (*cfg.io).*member ? *((*cfg.io).*member) : fallback;
}

int cmd_check_phi(const RunConfig& cfg, const CliOptions& opts, std::uint64_t seed, std::ostream& out) {
  std::mt19937_64 rng(seed);
  std::optional<Grid> grid;
  if (cfg.grid) grid = resolve_grid(*cfg.grid);
  const PhiFunctiond base = build_phi(*cfg.phi, grid ? &*grid : nullptr, rng, cfg.base_dir);
  const double compose = cfg.phi->compose.value_or(1.0);
  const PhiFunctiond phi = compose == 1.0 ? base : power_compose(base, compose);

  const ChecksSection checks = cfg.checks.value_or(ChecksSection{});
  const double inc = checks.inc.value_or(compose);
  const double dec = checks.dec.value_or(compose * natural_dec_exponent(base));
  ConditionSettings settings;
  if (checks.tolerance_multiplier) settings.tolerance_multiplier = *checks.tolerance_multiplier;
  const auto samples =
      log_samples(checks.t_min.value_or(1e-6), checks.t_max.value_or(1e6), int(checks.samples.value_or(200)));

  const std::vector<ConditionReport> reports = {
      check_A0(phi, default_beta_candidates(int(checks.beta_levels.value_or(20))), settings),
      check_aInc(phi, inc, samples, settings), check_aDec(phi, dec, samples, settings)};

  std::ostringstream text;
  text << "phi " << phi.name() << '\n';
  bool all = true;
  for (const auto& r : reports) {
    all = all && r.holds;
    text << (r.condition == Condition::A0 ? std::string("A0") : to_string(r.condition) + "(" + short_fmt(r.exponent) + ")")
         << ' ' << (r.holds ? "holds" : "fails") << ' '
         << (r.condition == Condition::A0 ? "beta=" : "L=") << fmt(r.witness_constant);
    if (!r.holds && r.failure_sample)
      text << " node=" << r.failure_sample->node << " t1=" << fmt(r.failure_sample->t1)
           << " t2=" << fmt(r.failure_sample->t2);
    text << '\n';
  }
  write_text(resolve(opts.output_dir, io_name(&IoSection::report, cfg, "check_phi.txt")), text.str());
  if (!opts.quiet) out << text.str();
  return all ? kExitSuccess : kExitPredicate;
}

int cmd_solve(const RunConfig& cfg, const CliOptions& opts, std::uint64_t seed, std::ostream& out) {
  std::mt19937_64 rng(seed);
  Problem pb = build_problem(cfg, rng);
  const auto& e = *cfg.energy;
  const EnergySpec spec = e.kind == "Ep"   ? EnergySpec::dirichlet(pb.phi, *e.p, pb.data)
                          : e.kind == "Fp" ? EnergySpec::fidelity(pb.phi, *e.p, pb.data)
                                           : limit_of(EnergySpec::fidelity(pb.phi, 1.0, pb.data));
  const std::string method = cfg.solver && cfg.solver->method
                                 ? *cfg.solver->method
                                 : (spec.is_limit() || spec.exponent() == 1.0 ? "primal_dual" : "smooth");
  const SolverOpts so = solver_opts(cfg.solver, seed, method == "primal_dual");
  const SolveReport r = method == "smooth" ? solve_smooth(spec, so) : solve_primal_dual(spec, so);

  const bool image = cfg.data->file && fs::path(*cfg.data->file).extension() == ".pgm";
  const std::string field_path =
      resolve(opts.output_dir, io_name(&IoSection::output, cfg, image ? "minimizer.pgm" : "minimizer.csv"));
  write_field(field_path, r.minimizer, pgm_options(cfg));
  const std::string report = solve_report_csv(spec, r, energy(spec, pb.data));
  write_text(resolve(opts.output_dir, io_name(&IoSection::report, cfg, "solve_report.csv")), report);
  if (!opts.quiet) out << report;
  return r.converged ? kExitSuccess : kExitNumerical;
}

int cmd_sweep(const RunConfig& cfg, const CliOptions& opts, std::uint64_t seed, std::ostream& out) {
  std::mt19937_64 rng(seed);
  Problem pb = build_problem(cfg, rng);
  const auto& e = *cfg.energy;
  const ScheduleSection sched = cfg.schedule.value_or(ScheduleSection{});
  const std::vector<double> schedule = sched.p.value_or(default_schedule());
  SweepConfig sc(e.kind == "Ep" ? EnergySpec::dirichlet(pb.phi, schedule.front(), pb.data)
                                : EnergySpec::fidelity(pb.phi, schedule.front(), pb.data));
  sc.schedule = schedule;
  sc.r = e.r;
  if (sched.limit.value_or(true)) sc.limit = limit_of(sc.spec);
  if (cfg.solver && cfg.solver->method == "smooth") sc.method = SweepMethod::Smooth;
  sc.opts = solver_opts(cfg.solver, seed, sc.method == SweepMethod::PrimalDual);
  sc.limit_opts = solver_opts(cfg.limit_solver ? cfg.limit_solver : cfg.solver, seed, true);
  if (sched.warm_start) sc.warm_start = *sched.warm_start;
  if (sched.tail) sc.tail = int(*sched.tail);
  if (sched.threads) sc.threads = int(*sched.threads);
  if (sched.gap_ratio) sc.gap_ratio = *sched.gap_ratio;
  if (sched.slack) sc.slack = *sched.slack;
  sc.distance_ratio = sched.distance_ratio;
  sc.output_path = resolve(opts.output_dir, io_name(&IoSection::csv, cfg, "sweep.csv"));

  const SweepReport rep = run_sweep(sc);
  if (!opts.quiet) {
    out << sweep_csv(rep);
    for (const auto& p : rep.predicates)
      out << p.name << ' ' << (!p.evaluated ? "n/a" : p.passed ? "pass" : "FAIL")
          << (p.detail.empty() ? "" : " (" + p.detail + ")") << '\n';
  }
  const bool all_converged =
      std::all_of(rep.rows.begin(), rep.rows.end(), [](const SweepRow& r) { return r.converged; }) &&
      (!rep.limit || rep.limit->converged);
  if (!all_converged) return kExitNumerical;
  return rep.passed() ? kExitSuccess : kExitPredicate;
}

int cmd_denoise(const RunConfig& cfg, const CliOptions& opts, std::uint64_t seed, std::ostream& out) {
  std::mt19937_64 rng(seed);
  Problem pb = build_problem(cfg, rng);
  const EnergySpec spec = limit_of(EnergySpec::fidelity(pb.phi, 1.0, pb.data));
  if (!spec.is_limit()) throw UsageError("denoise uses double_phase or variable_exponent");
  const SolveReport r = solve_limit(spec, solver_opts(cfg.solver, seed, true, kDenoiseTol));
  write_pgm(resolve(opts.output_dir, io_name(&IoSection::output, cfg, "denoised.pgm")), r.minimizer,
            pgm_options(cfg));
  const std::string report = solve_report_csv(spec, r, energy(spec, pb.data));
  write_text(resolve(opts.output_dir, io_name(&IoSection::report, cfg, "denoise_report.csv")), report);
  if (!opts.quiet) out << report;
  return r.converged ? kExitSuccess : kExitNumerical;
}

}  // namespace

ScalarFieldd build_field(const FieldSource& src, const Grid& g, std::mt19937_64& rng, const std::string& base_dir) {
  ScalarFieldd u(g, 0.0);
  if (src.constant) {
    u = ScalarFieldd(g, *src.constant);
  } else if (src.file) {
    u = read_field(resolve(base_dir, *src.file), g.spacing());
    if (!(u.grid() == g)) throw UsageError("field file " + *src.file + " does not match the grid " + g.describe());
  } else {
    u = generate(src, g, rng);
  }
  if (src.noise && *src.noise > 0.0) {
    std::uniform_real_distribution<double> dist(-*src.noise, *src.noise);
    for (Index k = 0; k < u.size(); ++k) u[k] += dist(rng);
  }
  return u;
}

PhiFunctiond build_phi(const PhiSection& phi, const Grid* g, std::mt19937_64& rng, const std::string& base_dir) {
  if (phi.family == "power") return PhiFunctiond::power(*phi.p, phi.weight.value_or(1.0));
  const FieldSource& coeff = phi.family == "double_phase" ? *phi.a : *phi.exponent;
  std::optional<Grid> local;
  if (!g) {
    if (needs_grid(coeff)) throw UsageError("config grid: required for non-constant Phi coefficients");
    local = Grid(2, 1.0);
    g = &*local;
  }
  ScalarFieldd field = build_field(coeff, *g, rng, base_dir);
  return phi.family == "double_phase" ? PhiFunctiond::double_phase(std::move(field))
                                      : PhiFunctiond::variable_exponent(std::move(field));
}

int run_command(const RunConfig& cfg, const CliOptions& opts, std::ostream& out) {
  const std::uint64_t seed = opts.seed.value_or(cfg.seed.value_or(0));
  fs::create_directories(opts.output_dir);
  switch (cfg.command) {
    case Command::CheckPhi: return cmd_check_phi(cfg, opts, seed, out);
    case Command::Solve: return cmd_solve(cfg, opts, seed, out);
    case Command::Sweep: return cmd_sweep(cfg, opts, seed, out);
    case Command::Denoise: return cmd_denoise(cfg, opts, seed, out);
  }
  return kExitUsage;
}

int run_cli(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(opts.config_path);
    return run_command(cfg, opts, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IndexError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace gorlicz
