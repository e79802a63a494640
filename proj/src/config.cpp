#include "gorlicz/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gorlicz/errors.hpp"

namespace gorlicz {

using Json = nlohmann::ordered_json;

std::string to_string(Command c) {
  switch (c) {
    case Command::CheckPhi: return "check-phi";
    case Command::Solve: return "solve";
    case Command::Sweep: return "sweep";
    case Command::Denoise: return "denoise";
  }
  return "?";
}

namespace {

const std::map<std::string, std::set<std::string>>& generator_params() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"constant", {"value"}},
      {"step", {"low", "high", "at"}},
      {"affine", {"offset", "slope"}},
      {"smoothstep", {"from", "to", "x0", "x1"}},
      {"vee", {"base", "slope", "center"}},
      {"uniform", {"low", "high"}},
      {"disk", {"low", "high", "radius", "cx", "cy"}},
  };
  return table;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw UsageError("config " + (path.empty() ? std::string("root") : path) + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void allow_keys(const Json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) fail(join(path, key), "unknown key");
}

double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long get_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long>();
}

bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

template <class T, class F>
void read_opt(const Json& j, const std::string& path, const char* key, std::optional<T>& out, F get) {
  if (j.contains(key)) out = get(j.at(key), join(path, key));
}

FieldSource parse_field(const Json& j, const std::string& path) {
  FieldSource f;
  if (j.is_number()) {
    f.constant = j.get<double>();
    return f;
  }
  if (!j.is_object()) fail(path, "expected a number, {\"file\": ...} or {\"generator\": ...}");
  if (j.contains("file") == j.contains("generator")) fail(path, "needs exactly one of 'file' or 'generator'");
  read_opt(j, path, "noise", f.noise, get_number);
  if (f.noise && !(*f.noise >= 0.0)) fail(join(path, "noise"), "must be nonnegative");
  if (j.contains("file")) {
    allow_keys(j, path, {"file", "noise"});
    f.file = get_string(j.at("file"), join(path, "file"));
    return f;
  }
  f.generator = get_string(j.at("generator"), join(path, "generator"));
  const auto it = generator_params().find(*f.generator);
  if (it == generator_params().end()) fail(join(path, "generator"), "unknown generator '" + *f.generator + "'");
  for (const auto& [key, value] : j.items()) {
    if (key == "generator" || key == "noise") continue;
    if (!it->second.count(key)) fail(join(path, key), "unknown parameter for generator '" + *f.generator + "'");
    f.params[key] = get_number(value, join(path, key));
  }
  return f;
}

Json field_json(const FieldSource& f) {
  if (f.constant) return *f.constant;
  Json j = Json::object();
  if (f.file) j["file"] = *f.file;
  if (f.generator) j["generator"] = *f.generator;
  for (const auto& [k, v] : f.params) j[k] = v;
  if (f.noise) j["noise"] = *f.noise;
  return j;
}

GridSection parse_grid(const Json& j, const std::string& path) {
  require_object(j, path);
  allow_keys(j, path, {"nx", "ny", "h", "length"});
  GridSection g;
  read_opt(j, path, "nx", g.nx, get_integer);
  read_opt(j, path, "ny", g.ny, get_integer);
  read_opt(j, path, "h", g.h, get_number);
  read_opt(j, path, "length", g.length, get_number);
  if (g.h && g.length) fail(path, "give either 'h' or 'length', not both");
  if (g.nx && *g.nx < 2) fail(join(path, "nx"), "must be >= 2");
  if (g.ny && *g.ny < 2) fail(join(path, "ny"), "must be >= 2");
  if (g.h && !(*g.h > 0.0)) fail(join(path, "h"), "must be positive");
  if (g.length && !(*g.length > 0.0)) fail(join(path, "length"), "must be positive");
  return g;
}

PhiSection parse_phi(const Json& j, const std::string& path) {
  require_object(j, path);
  if (!j.contains("family")) fail(join(path, "family"), "missing required key");
  PhiSection phi;
  phi.family = get_string(j.at("family"), join(path, "family"));
  if (phi.family == "power") {
    allow_keys(j, path, {"family", "p", "weight", "compose"});
    read_opt(j, path, "p", phi.p, get_number);
    read_opt(j, path, "weight", phi.weight, get_number);
    if (!phi.p) fail(join(path, "p"), "missing required key");
  } else if (phi.family == "double_phase") {
    allow_keys(j, path, {"family", "a", "compose"});
    if (!j.contains("a")) fail(join(path, "a"), "missing required key");
    phi.a = parse_field(j.at("a"), join(path, "a"));
  } else if (phi.family == "variable_exponent") {
    allow_keys(j, path, {"family", "exponent", "compose"});
    if (!j.contains("exponent")) fail(join(path, "exponent"), "missing required key");
    phi.exponent = parse_field(j.at("exponent"), join(path, "exponent"));
  } else {
    fail(join(path, "family"), "unknown family '" + phi.family + "'");
  }
  read_opt(j, path, "compose", phi.compose, get_number);
  if (phi.compose && !(*phi.compose >= 1.0)) fail(join(path, "compose"), "must be >= 1");
  return phi;
}

Json phi_json(const PhiSection& phi) {
  Json j = Json::object();
  j["family"] = phi.family;
  if (phi.p) j["p"] = *phi.p;
  if (phi.weight) j["weight"] = *phi.weight;
  if (phi.a) j["a"] = field_json(*phi.a);
  if (phi.exponent) j["exponent"] = field_json(*phi.exponent);
  if (phi.compose) j["compose"] = *phi.compose;
  return j;
}

EnergySection parse_energy(const Json& j, const std::string& path) {
  require_object(j, path);
  allow_keys(j, path, {"kind", "p", "r"});
  if (!j.contains("kind")) fail(join(path, "kind"), "missing required key");
  EnergySection e;
  e.kind = get_string(j.at("kind"), join(path, "kind"));
  if (e.kind != "Fp" && e.kind != "Ep" && e.kind != "limit") fail(join(path, "kind"), "must be Fp, Ep or limit");
  read_opt(j, path, "p", e.p, get_number);
  read_opt(j, path, "r", e.r, get_number);
  if (e.p && !(*e.p >= 1.0)) fail(join(path, "p"), "must be >= 1");
  if (e.r && !(*e.r > 1.0)) fail(join(path, "r"), "must be > 1");
  if (e.kind == "limit" && (e.p || e.r)) fail(path, "the limit functional takes no exponent");
  return e;
}

Json energy_json(const EnergySection& e) {
  Json j = Json::object();
  j["kind"] = e.kind;
  if (e.p) j["p"] = *e.p;
  if (e.r) j["r"] = *e.r;
  return j;
}

SolverSection parse_solver(const Json& j, const std::string& path) {
  require_object(j, path);
  allow_keys(j, path,
             {"method", "max_iter", "patience", "max_backtracks", "trace_stride", "tol", "gtol", "smoothing",
              "armijo", "backtrack", "tau", "sigma", "random_init"});
  SolverSection s;
  read_opt(j, path, "method", s.method, get_string);
  if (s.method && *s.method != "smooth" && *s.method != "primal_dual")
    fail(join(path, "method"), "must be smooth or primal_dual");
  read_opt(j, path, "max_iter", s.max_iter, get_integer);
  read_opt(j, path, "patience", s.patience, get_integer);
  read_opt(j, path, "max_backtracks", s.max_backtracks, get_integer);
  read_opt(j, path, "trace_stride", s.trace_stride, get_integer);
  read_opt(j, path, "tol", s.tol, get_number);
  read_opt(j, path, "gtol", s.gtol, get_number);
  read_opt(j, path, "smoothing", s.smoothing, get_number);
  read_opt(j, path, "armijo", s.armijo, get_number);
  read_opt(j, path, "backtrack", s.backtrack, get_number);
  read_opt(j, path, "tau", s.tau, get_number);
  read_opt(j, path, "sigma", s.sigma, get_number);
  read_opt(j, path, "random_init", s.random_init, get_bool);
  for (const auto* key : {"max_iter", "patience", "max_backtracks", "trace_stride"})
    if (j.contains(key) && j.at(key).get<long>() < 1) fail(join(path, key), "must be >= 1");
  if (s.tol && !(*s.tol >= 0.0)) fail(join(path, "tol"), "must be nonnegative");
  if (s.gtol && !(*s.gtol >= 0.0)) fail(join(path, "gtol"), "must be nonnegative");
  if (s.backtrack && !(*s.backtrack > 0.0 && *s.backtrack < 1.0)) fail(join(path, "backtrack"), "must lie in (0, 1)");
  if (s.armijo && !(*s.armijo > 0.0 && *s.armijo < 1.0)) fail(join(path, "armijo"), "must lie in (0, 1)");
  return s;
}

Json solver_json(const SolverSection& s) {
  Json j = Json::object();
  if (s.method) j["method"] = *s.method;
  if (s.max_iter) j["max_iter"] = *s.max_iter;
  if (s.patience) j["patience"] = *s.patience;
  if (s.max_backtracks) j["max_backtracks"] = *s.max_backtracks;
  if (s.trace_stride) j["trace_stride"] = *s.trace_stride;
  if (s.tol) j["tol"] = *s.tol;
  if (s.gtol) j["gtol"] = *s.gtol;
  if (s.smoothing) j["smoothing"] = *s.smoothing;
  if (s.armijo) j["armijo"] = *s.armijo;
  if (s.backtrack) j["backtrack"] = *s.backtrack;
  if (s.tau) j["tau"] = *s.tau;
  if (s.sigma) j["sigma"] = *s.sigma;
  if (s.random_init) j["random_init"] = *s.random_init;
  return j;
}

ScheduleSection parse_schedule(const Json& j, const std::string& path) {
  require_object(j, path);
  allow_keys(j, path, {"p", "warm_start", "limit", "tail", "threads", "gap_ratio", "distance_ratio", "slack"});
  ScheduleSection s;
  if (j.contains("p")) {
    const auto& arr = j.at("p");
    if (!arr.is_array() || arr.empty()) fail(join(path, "p"), "expected a nonempty array of numbers");
    std::vector<double> ps;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string at = join(path, "p") + "[" + std::to_string(k) + "]";
      ps.push_back(get_number(arr[k], at));
      if (!(ps.back() > 1.0)) fail(at, "schedule entries must be > 1");
      if (k > 0 && !(ps[k] < ps[k - 1])) fail(at, "schedule must be strictly decreasing");
    }
    s.p = std::move(ps);
  }
  read_opt(j, path, "warm_start", s.warm_start, get_bool);
  read_opt(j, path, "limit", s.limit, get_bool);
  read_opt(j, path, "tail", s.tail, get_integer);
  read_opt(j, path, "threads", s.threads, get_integer);
  read_opt(j, path, "gap_ratio", s.gap_ratio, get_number);
  read_opt(j, path, "distance_ratio", s.distance_ratio, get_number);
  read_opt(j, path, "slack", s.slack, get_number);
  if (s.tail && *s.tail < 2) fail(join(path, "tail"), "must be >= 2");
  if (s.threads && *s.threads < 0) fail(join(path, "threads"), "must be >= 0");
  for (const auto* key : {"gap_ratio", "distance_ratio", "slack"})
    if (j.contains(key) && !(j.at(key).get<double>() >= 0.0)) fail(join(path, key), "must be nonnegative");
  return s;
}

Json schedule_json(const ScheduleSection& s) {
  Json j = Json::object();
  if (s.p) j["p"] = *s.p;
  if (s.warm_start) j["warm_start"] = *s.warm_start;
  if (s.limit) j["limit"] = *s.limit;
  if (s.tail) j["tail"] = *s.tail;
  if (s.threads) j["threads"] = *s.threads;
  if (s.gap_ratio) j["gap_ratio"] = *s.gap_ratio;
  if (s.distance_ratio) j["distance_ratio"] = *s.distance_ratio;
  if (s.slack) j["slack"] = *s.slack;
  return j;
}

ChecksSection parse_checks(const Json& j, const std::string& path) {
  require_object(j, path);
  allow_keys(j, path, {"inc", "dec", "t_min", "t_max", "tolerance_multiplier", "samples", "beta_levels"});
  ChecksSection c;
  read_opt(j, path, "inc", c.inc, get_number);
  read_opt(j, path, "dec", c.dec, get_number);
  read_opt(j, path, "t_min", c.t_min, get_number);
  read_opt(j, path, "t_max", c.t_max, get_number);
  read_opt(j, path, "tolerance_multiplier", c.tolerance_multiplier, get_number);
  read_opt(j, path, "samples", c.samples, get_integer);
  read_opt(j, path, "beta_levels", c.beta_levels, get_integer);
  if (c.inc && !(*c.inc > 0.0)) fail(join(path, "inc"), "must be positive");
  if (c.dec && !(*c.dec > 0.0)) fail(join(path, "dec"), "must be positive");
  if (c.t_min && !(*c.t_min > 0.0)) fail(join(path, "t_min"), "must be positive");
  if (c.t_min && c.t_max && !(*c.t_max > *c.t_min)) fail(join(path, "t_max"), "must exceed t_min");
  if (c.tolerance_multiplier && !(*c.tolerance_multiplier >= 1.0))
    fail(join(path, "tolerance_multiplier"), "must be >= 1");
  if (c.samples && *c.samples < 2) fail(join(path, "samples"), "must be >= 2");
  if (c.beta_levels && (*c.beta_levels < 0 || *c.beta_levels > 60)) fail(join(path, "beta_levels"), "must lie in [0, 60]");
  return c;
}

Json checks_json(const ChecksSection& c) {
  Json j = Json::object();
  if (c.inc) j["inc"] = *c.inc;
  if (c.dec) j["dec"] = *c.dec;
  if (c.t_min) j["t_min"] = *c.t_min;
  if (c.t_max) j["t_max"] = *c.t_max;
  if (c.tolerance_multiplier) j["tolerance_multiplier"] = *c.tolerance_multiplier;
  if (c.samples) j["samples"] = *c.samples;
  if (c.beta_levels) j["beta_levels"] = *c.beta_levels;
  return j;
}

IoSection parse_io(const Json& j, const std::string& path) {
  require_object(j, path);
  allow_keys(j, path, {"output", "report", "csv", "pgm_maxval", "pgm_binary"});
  IoSection io;
  read_opt(j, path, "output", io.output, get_string);
  read_opt(j, path, "report", io.report, get_string);
  read_opt(j, path, "csv", io.csv, get_string);
  read_opt(j, path, "pgm_maxval", io.pgm_maxval, get_integer);
  read_opt(j, path, "pgm_binary", io.pgm_binary, get_bool);
  if (io.pgm_maxval && (*io.pgm_maxval < 1 || *io.pgm_maxval > 65535))
    fail(join(path, "pgm_maxval"), "must lie in [1, 65535]");
  return io;
}

Json io_json(const IoSection& io) {
  Json j = Json::object();
  if (io.output) j["output"] = *io.output;
  if (io.report) j["report"] = *io.report;
  if (io.csv) j["csv"] = *io.csv;
  if (io.pgm_maxval) j["pgm_maxval"] = *io.pgm_maxval;
  if (io.pgm_binary) j["pgm_binary"] = *io.pgm_binary;
  return j;
}

Command parse_command(const Json& j) {
  const std::string name = get_string(j, "command");
  for (Command c : {Command::CheckPhi, Command::Solve, Command::Sweep, Command::Denoise})
    if (to_string(c) == name) return c;
  fail("command", "must be one of check-phi, solve, sweep, denoise");
}

bool is_file_field(const std::optional<FieldSource>& f) { return f && f->file; }

void require(bool present, const std::string& key, Command c) {
  if (!present) fail(key, "required by command '" + to_string(c) + "'");
}

void validate_command(const RunConfig& cfg) {
  const Command c = cfg.command;
  require(cfg.phi.has_value() || c == Command::Denoise, "phi", c);
  if (c == Command::CheckPhi) return;
  require(cfg.data.has_value(), "data", c);
  const bool grid_from_file = is_file_field(cfg.data);
  if (!grid_from_file) {
    require(cfg.grid.has_value(), "grid", c);
    require(cfg.grid->nx.has_value(), "grid.nx", c);
  } else if (cfg.grid && (cfg.grid->nx || cfg.grid->ny || cfg.grid->length)) {
    fail("grid", "only 'h' may override the geometry of a data file");
  }
  if (c == Command::Solve || c == Command::Sweep) require(cfg.energy.has_value(), "energy", c);
  if (c == Command::Solve && cfg.energy->kind != "limit" && !cfg.energy->p) fail("energy.p", "required by 'solve'");
  if (c == Command::Sweep && cfg.energy->kind == "limit") fail("energy.kind", "sweeps need an Fp or Ep template");
  if (c == Command::Sweep && cfg.energy->kind == "Ep" && !cfg.energy->r)
    fail("energy.r", "Ep sweeps must record the integrability exponent r");
  if (c == Command::Denoise) {
    if (!grid_from_file || cfg.data->file->size() < 4) fail("data", "denoise reads its image from a PGM file");
    if (cfg.phi && cfg.phi->family == "power") fail("phi.family", "denoise uses double_phase or variable_exponent");
    if (cfg.energy) fail("energy", "denoise always solves the limit functional");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(j, "");
  allow_keys(j, "",
             {"command", "seed", "grid", "phi", "data", "energy", "solver", "limit_solver", "schedule", "checks", "io"});
  if (!j.contains("command")) fail("command", "missing required key");
  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.command = parse_command(j.at("command"));
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("grid")) cfg.grid = parse_grid(j.at("grid"), "grid");
  if (j.contains("phi")) cfg.phi = parse_phi(j.at("phi"), "phi");
  if (j.contains("data")) cfg.data = parse_field(j.at("data"), "data");
  if (j.contains("energy")) cfg.energy = parse_energy(j.at("energy"), "energy");
  if (j.contains("solver")) cfg.solver = parse_solver(j.at("solver"), "solver");
  if (j.contains("limit_solver")) cfg.limit_solver = parse_solver(j.at("limit_solver"), "limit_solver");
  if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule"), "schedule");
  if (j.contains("checks")) cfg.checks = parse_checks(j.at("checks"), "checks");
  if (j.contains("io")) cfg.io = parse_io(j.at("io"), "io");
  validate_command(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot read config file " + path);
  std::stringstream buf;
  buf << file.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), dir.empty() ? "." : dir.string());
}

std::string serialize_config(const RunConfig& cfg) {
  Json j = Json::object();
  j["command"] = to_string(cfg.command);
  if (cfg.seed) j["seed"] = *cfg.seed;
  if (cfg.grid) {
    Json g = Json::object();
    if (cfg.grid->nx) g["nx"] = *cfg.grid->nx;
    if (cfg.grid->ny) g["ny"] = *cfg.grid->ny;
    if (cfg.grid->h) g["h"] = *cfg.grid->h;
    if (cfg.grid->length) g["length"] = *cfg.grid->length;
    j["grid"] = g;
  }
  if (cfg.phi) j["phi"] = phi_json(*cfg.phi);
  if (cfg.data) j["data"] = field_json(*cfg.data);
  if (cfg.energy) j["energy"] = energy_json(*cfg.energy);
  if (cfg.solver) j["solver"] = solver_json(*cfg.solver);
  if (cfg.limit_solver) j["limit_solver"] = solver_json(*cfg.limit_solver);
  if (cfg.schedule) j["schedule"] = schedule_json(*cfg.schedule);
  if (cfg.checks) j["checks"] = checks_json(*cfg.checks);
  if (cfg.io) j["io"] = io_json(*cfg.io);
  return j.dump(2) + "\n";
}

Grid resolve_grid(const GridSection& g) {
  if (!g.nx) throw UsageError("config grid.nx: missing required key");
  const double length = g.length.value_or(1.0);
  const double h = g.h.value_or(length / double(*g.nx - 1));
  return g.ny ? Grid(*g.nx, *g.ny, h) : Grid(*g.nx, h);
}

}  // namespace gorlicz
