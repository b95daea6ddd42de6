#include "wavenull/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "wavenull/error.hpp"

namespace wavenull {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ":" << line << ": " << what;
    throw Error(ErrorCode::parse, msg.str());
  }

  double number(const Entry& e) const {
    double v = 0.0;
    const std::string s = trim(e.value);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(e.line, "expected a number, got '" + e.value + "'");
    }
    return v;
  }

  int integer(const Entry& e) const {
    int v = 0;
    const std::string s = trim(e.value);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(e.line, "expected an integer, got '" + e.value + "'");
    }
    return v;
  }

  bool boolean(const Entry& e) const {
    const std::string s = lower(trim(e.value));
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    fail(e.line, "expected a boolean, got '" + e.value + "'");
  }

  std::vector<double> numbers(const Entry& e) const {
    std::istringstream in(e.value);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(number({tok, e.line}));
    return out;
  }

 private:
  std::string source_;
};

}  // namespace

ProblemConfig parse_config(std::istream& in, const std::string& source) {
  const Reader rd(source);
  static const std::map<std::string, std::vector<std::string>> known = {
      {"coefficient", {"kind", "value", "coeffs", "left", "right", "x_start", "x_end"}},
      {"potential", {"value"}},
      {"data", {"y0", "y1"}},
      {"weights", {"x0", "beta", "lambda", "s", "M0", "delta", "T", "cutoff"}},
      {"mesh", {"Nx", "Nt", "mode", "substeps", "enforce_horizon", "quad_order"}},
  };
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::string current;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') rd.fail(lineno, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (!known.count(current)) rd.fail(lineno, "unknown section [" + current + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) rd.fail(lineno, "expected 'key = value'");
    if (current.empty()) rd.fail(lineno, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = known.at(current);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      rd.fail(lineno, "unknown key '" + key + "' in [" + current + "]");
    }
    if (sections[current].count(key)) rd.fail(lineno, "duplicate key '" + key + "'");
    if (value.empty()) rd.fail(lineno, "empty value for '" + key + "'");
    sections[current][key] = {value, lineno};
  }

  ProblemConfig cfg;
  auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    const auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };

  if (const Entry* kind = get("coefficient", "kind")) {
    const std::string k = lower(kind->value);
    auto need = [&](const std::string& key) {
      const Entry* e = get("coefficient", key);
      if (!e) rd.fail(kind->line, "coefficient kind '" + k + "' needs key '" + key + "'");
      return *e;
    };
    try {
      if (k == "constant") {
        cfg.coefficient = CoefficientField::constant(rd.number(need("value")));
      } else if (k == "polynomial") {
        cfg.coefficient = CoefficientField::polynomial(rd.numbers(need("coeffs")));
      } else if (k == "transition") {
        cfg.coefficient = CoefficientField::transition(
            rd.number(need("left")), rd.number(need("right")), rd.number(need("x_start")),
            rd.number(need("x_end")));
      } else {
        rd.fail(kind->line, "unknown coefficient kind '" + kind->value + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::parse) throw;
      rd.fail(kind->line, e.what());
    }
  } else if (get("coefficient", "value")) {
    cfg.coefficient = CoefficientField::constant(rd.number(*get("coefficient", "value")));
  }

  if (const Entry* b = get("potential", "value")) cfg.potential = PotentialField::constant(rd.number(*b));

  for (const char* key : {"y0", "y1"}) {
    if (const Entry* e = get("data", key)) {
      try {
        (key[1] == '0' ? cfg.data.y0 : cfg.data.y1) = DataFunction::parse(e->value);
      } catch (const Error& err) {
        rd.fail(e->line, err.what());
      }
    }
  }

  WeightParams& w = cfg.weights;
  if (const Entry* e = get("weights", "x0")) w.x0 = rd.number(*e);
  if (const Entry* e = get("weights", "beta")) w.beta = rd.number(*e);
  if (const Entry* e = get("weights", "lambda")) w.lambda = rd.number(*e);
  if (const Entry* e = get("weights", "s")) w.s = rd.number(*e);
  if (const Entry* e = get("weights", "M0")) w.M0 = rd.number(*e);
  if (const Entry* e = get("weights", "delta")) w.delta = rd.number(*e);
  if (const Entry* e = get("weights", "T")) w.T = rd.number(*e);
  if (const Entry* e = get("weights", "cutoff")) {
    const std::string c = lower(e->value);
    if (c == "smoothstep") {
      w.cutoff = CutoffShape::smoothstep;
    } else if (c == "root") {
      w.cutoff = CutoffShape::root;
    } else {
      rd.fail(e->line, "cutoff must be 'smoothstep' or 'root'");
    }
  }

  if (const Entry* e = get("mesh", "Nx")) cfg.nx = rd.integer(*e);
  if (const Entry* e = get("mesh", "Nt")) {
    cfg.nt = rd.integer(*e);
  } else {
    cfg.nt = matched_time_cells(cfg.nx, w.T);
  }
  if (const Entry* e = get("mesh", "mode")) {
    const std::string m = lower(e->value);
    if (m == "exact") {
      cfg.mode = WeightMode::exact;
    } else if (m == "interpolated") {
      cfg.mode = WeightMode::interpolated;
    } else {
      rd.fail(e->line, "mode must be 'exact' or 'interpolated'");
    }
  }
  if (const Entry* e = get("mesh", "substeps")) cfg.substeps = rd.integer(*e);
  if (const Entry* e = get("mesh", "enforce_horizon")) cfg.enforce_horizon = rd.boolean(*e);
  if (const Entry* e = get("mesh", "quad_order")) cfg.quad_order = rd.integer(*e);
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file '" + path + "'");
  return parse_config(in, path);
}

void write_config(std::ostream& out, const ProblemConfig& c) {
  out.precision(17);
  out << "[coefficient]\n";
  const auto& p = c.coefficient.params();
  switch (c.coefficient.kind()) {
    case CoefficientField::Kind::constant:
      out << "kind = constant\nvalue = " << p[0] << "\n";
      break;
    case CoefficientField::Kind::polynomial:
      out << "kind = polynomial\ncoeffs =";
      for (double v : p) out << ' ' << v;
      out << "\n";
      break;
    case CoefficientField::Kind::transition:
      out << "kind = transition\nleft = " << p[0] << "\nright = " << p[1] << "\nx_start = " << p[2]
          << "\nx_end = " << p[3] << "\n";
      break;
  }
  if (!c.potential.is_constant()) {
    throw Error(ErrorCode::invalid_argument, "only constant potentials can be written");
  }
  out << "[potential]\nvalue = " << c.potential(0.0, 0.0) << "\n";
  out << "[data]\ny0 = " << c.data.y0.describe() << "\ny1 = " << c.data.y1.describe() << "\n";
  const WeightParams& w = c.weights;
  out << "[weights]\nx0 = " << w.x0 << "\nbeta = " << w.beta << "\nlambda = " << w.lambda
      << "\ns = " << w.s << "\nT = " << w.T << "\n";
  if (w.M0) out << "M0 = " << *w.M0 << "\n";
  if (w.delta) out << "delta = " << *w.delta << "\n";
  out << "cutoff = " << (w.cutoff == CutoffShape::root ? "root" : "smoothstep") << "\n";
  out << "[mesh]\nNx = " << c.nx << "\nNt = " << c.nt << "\nmode = "
      << (c.mode == WeightMode::exact ? "exact" : "interpolated") << "\nsubsteps = " << c.substeps
      << "\nenforce_horizon = " << (c.enforce_horizon ? "true" : "false")
      << "\nquad_order = " << c.quad_order << "\n";
}

}  // namespace wavenull
