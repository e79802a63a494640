#include "gorlicz/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "gorlicz/errors.hpp"

namespace gorlicz {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw IoError("malformed " + what + ": '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw IoError("malformed " + what + ": '" + s + "'");
  return v;
}

Grid make_grid(long nx, long ny, double h) {
  try {
    return ny <= 1 ? Grid(nx, h) : Grid(nx, ny, h);
  } catch (const UsageError& e) {
    throw IoError(std::string("invalid field geometry: ") + e.what());
  }
}

std::string extension(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (auto& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// Header tokenizer: whitespace separated, '#' comments collected until end of line.
class PgmHeader {
 public:
  explicit PgmHeader(std::istream& in) : in_(in) {}

  std::string token() {
    std::string tok;
    for (;;) {
      const int c = in_.get();
      if (c == EOF) break;
      if (c == '#' && tok.empty()) {
        std::string line;
        std::getline(in_, line);
        comments.push_back(line);
        continue;
      }
      if (std::isspace(c)) {
        if (tok.empty()) continue;
        break;
      }
      tok.push_back(char(c));
    }
    if (tok.empty()) throw IoError("truncated PGM header");
    return tok;
  }

  std::vector<std::string> comments;

 private:
  std::istream& in_;
};

}  // namespace

void write_pgm(std::ostream& out, const ScalarFieldd& u, const PgmOptions& opts) {
  const Grid& g = u.grid();
  if (g.dims() > 2) throw UsageError("PGM holds 1D or 2D fields only");
  if (opts.maxval < 1 || opts.maxval > 65535) throw UsageError("PGM maxval must lie in [1, 65535]");
  const double lo = opts.lo.value_or(u.min());
  const double hi = opts.hi.value_or(u.max());
  if (!(hi >= lo)) throw UsageError("PGM range must satisfy min <= max");
  const long width = g.extent(0);
  const long height = g.dims() == 2 ? g.extent(1) : 1;
  out << (opts.binary ? "P5" : "P2") << '\n'
      << "# range " << fmt(lo) << ' ' << fmt(hi) << '\n'
      << "# spacing " << fmt(g.spacing()) << '\n'
      << width << ' ' << height << '\n'
      << opts.maxval << '\n';
  const double scale = hi > lo ? double(opts.maxval) / (hi - lo) : 0.0;
  for (Index k = 0; k < u.size(); ++k) {
    const double level = std::clamp(std::round((u[k] - lo) * scale), 0.0, double(opts.maxval));
    const unsigned v = unsigned(level);
    if (!opts.binary) {
      out << v << ((k + 1) % width == 0 ? '\n' : ' ');
    } else if (opts.maxval > 255) {
      out.put(char(v >> 8)).put(char(v & 0xff));
    } else {
      out.put(char(v));
    }
  }
  if (!out) throw IoError("failed writing PGM data");
}

void write_pgm(const std::string& path, const ScalarFieldd& u, const PgmOptions& opts) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write_pgm(file, u, opts);
}

ScalarFieldd read_pgm(std::istream& in, std::optional<double> spacing) {
  PgmHeader header(in);
  const std::string magic = header.token();
  if (magic != "P2" && magic != "P5") throw IoError("not a PGM file (magic '" + magic + "')");
  const long width = parse_long(header.token(), "PGM width");
  const long height = parse_long(header.token(), "PGM height");
  const long maxval = parse_long(header.token(), "PGM maxval");
  if (width < 1 || height < 1) throw IoError("PGM dimensions must be positive");
  if (maxval < 1 || maxval > 65535) throw IoError("PGM maxval must lie in [1, 65535]");

  double lo = 0.0, hi = 1.0, h = 1.0;
  for (const auto& c : header.comments) {
    std::istringstream line(c);
    std::string key, a, b;
    line >> key;
    if (key == "range") {
      line >> a >> b;
      lo = parse_double(a, "PGM range");
      hi = parse_double(b, "PGM range");
      if (!(hi >= lo)) throw IoError("PGM range must satisfy min <= max");
    } else if (key == "spacing") {
      line >> a;
      h = parse_double(a, "PGM spacing");
    }
  }
  if (spacing) h = *spacing;
  const Grid g = make_grid(width, height, h);

  Vector<double> values(g.size());
  const double scale = (hi - lo) / double(maxval);
  for (Index k = 0; k < g.size(); ++k) {
    long v = 0;
    if (magic == "P2") {
      std::string tok;
      if (!(in >> tok)) throw IoError("truncated PGM data");
      v = parse_long(tok, "PGM sample");
    } else if (maxval > 255) {
      const int hi_byte = in.get(), lo_byte = in.get();
      if (lo_byte == EOF) throw IoError("truncated PGM data");
      v = (long(hi_byte) << 8) | long(lo_byte);
    } else {
      const int byte = in.get();
      if (byte == EOF) throw IoError("truncated PGM data");
      v = byte;
    }
    if (v < 0 || v > maxval) throw IoError("PGM sample exceeds maxval");
    values[k] = lo + double(v) * scale;
  }
  return ScalarFieldd(g, std::move(values));
}

ScalarFieldd read_pgm(const std::string& path, std::optional<double> spacing) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path);
  return read_pgm(file, spacing);
}

void write_csv_field(std::ostream& out, const ScalarFieldd& u) {
  out << u.grid().describe() << ',' << fmt(u.grid().spacing()) << '\n';
  for (Index k = 0; k < u.size(); ++k) out << fmt(u[k]) << '\n';
  if (!out) throw IoError("failed writing CSV field");
}

void write_csv_field(const std::string& path, const ScalarFieldd& u) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write_csv_field(file, u);
}

ScalarFieldd read_csv_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV field");
  if (line == "dims,h" && !std::getline(in, line)) throw IoError("CSV field without geometry row");
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw IoError("CSV field header must be 'dims,h'");
  const std::string dims = line.substr(0, comma);
  const double h = parse_double(line.substr(comma + 1), "CSV spacing");
  const auto x = dims.find('x');
  const long nx = parse_long(dims.substr(0, x), "CSV dims");
  const long ny = x == std::string::npos ? 1 : parse_long(dims.substr(x + 1), "CSV dims");
  const Grid g = make_grid(nx, ny, h);

  Vector<double> values(g.size());
  Index k = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (k >= g.size()) throw IoError("CSV field has more values than its dims");
    values[k++] = parse_double(line, "CSV value");
  }
  if (k != g.size()) throw IoError("CSV field has fewer values than its dims");
  try {
    return ScalarFieldd(g, std::move(values));
  } catch (const DomainError& e) {
    throw IoError(std::string("CSV field: ") + e.what());
  }
}

ScalarFieldd read_csv_field(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path);
  return read_csv_field(file);
}

ScalarFieldd read_field(const std::string& path, std::optional<double> spacing) {
  const std::string ext = extension(path);
  if (ext == "pgm") return read_pgm(path, spacing);
  if (ext == "csv") {
    ScalarFieldd u = read_csv_field(path);
    if (!spacing) return u;
    const Grid& g = u.grid();
    return ScalarFieldd(g.dims() == 1 ? Grid(g.extent(0), *spacing) : Grid(g.extent(0), g.extent(1), *spacing),
                        u.values());
  }
  throw IoError("unsupported field file extension: " + path);
}

void write_field(const std::string& path, const ScalarFieldd& u, const PgmOptions& opts) {
  const std::string ext = extension(path);
  if (ext == "pgm") return write_pgm(path, u, opts);
  if (ext == "csv") return write_csv_field(path, u);
  throw IoError("unsupported field file extension: " + path);
}

}  // namespace gorlicz
