#include "jost/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace jost::cli {

ConfigError::ConfigError(int ln, std::string f, const std::string& what)
    : std::runtime_error((ln > 0 ? "line " + std::to_string(ln) + ": " : std::string()) + f + ": " + what),
      line(ln),
      field(std::move(f)) {}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> tokens(const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

struct Entry {
  std::string value;
  int line;
};

class Reader {
 public:
  Reader(std::multimap<std::string, Entry> entries) : e_(std::move(entries)) {}

  bool has(const std::string& key) const { return e_.count(key) > 0; }
  const Entry* find(const std::string& key) const {
    auto it = e_.find(key);
    return it == e_.end() ? nullptr : &it->second;
  }
  std::vector<Entry> all(const std::string& key) const {
    std::vector<Entry> out;
    auto [lo, hi] = e_.equal_range(key);
    for (auto it = lo; it != hi; ++it) out.push_back(it->second);
    return out;
  }

  double number(const std::string& key, const std::string& text, int line) const {
    const std::string t = trim(text);
    // fractions such as 3/2 are accepted for angular momenta
    if (auto slash = t.find('/'); slash != std::string::npos) {
      return number(key, t.substr(0, slash), line) / number(key, t.substr(slash + 1), line);
    }
    double v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
      throw ConfigError(line, key, "expected a number, got '" + t + "'");
    return v;
  }
  void get(const std::string& key, double& out) const {
    if (auto* x = find(key)) out = number(key, x->value, x->line);
  }
  void get(const std::string& key, int& out) const {
    if (auto* x = find(key)) {
      const double v = number(key, x->value, x->line);
      if (v != std::round(v) || std::abs(v) > 1e9) throw ConfigError(x->line, key, "expected an integer");
      out = static_cast<int>(v);
    }
  }
  void get(const std::string& key, bool& out) const {
    if (auto* x = find(key)) {
      const std::string v = trim(x->value);
      if (v == "true" || v == "yes" || v == "1")
        out = true;
      else if (v == "false" || v == "no" || v == "0")
        out = false;
      else
        throw ConfigError(x->line, key, "expected true or false");
    }
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    if (auto* x = find(key))
      for (auto& t : tokens(x->value)) out.push_back(number(key, t, x->line));
    return out;
  }
  //! `lo hi n`, n evenly spaced points including both ends.
  bool range(const std::string& key, double& lo, double& hi, int& n) const {
    auto* x = find(key);
    if (!x) return false;
    auto t = tokens(x->value);
    if (t.size() != 3) throw ConfigError(x->line, key, "expected 'lo hi n'");
    lo = number(key, t[0], x->line);
    hi = number(key, t[1], x->line);
    const double nn = number(key, t[2], x->line);
    if (nn < 1 || nn != std::round(nn)) throw ConfigError(x->line, key, "point count must be a positive integer");
    n = static_cast<int>(nn);
    if (n > 1 && !(hi > lo)) throw ConfigError(x->line, key, "need lo < hi");
    return true;
  }
  int line_of(const std::string& key) const {
    auto* x = find(key);
    return x ? x->line : 0;
  }

 private:
  std::multimap<std::string, Entry> e_;
};

std::vector<double> spaced(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

Sign parse_sign(const std::string& key, const std::string& t, int line) {
  if (t == "+" || t == "+1" || t == "1") return Sign::plus();
  if (t == "-" || t == "-1") return Sign::minus();
  throw ConfigError(line, key, "expected a sign (+ or -), got '" + t + "'");
}

const std::set<std::string> known_keys{
    "interaction.kind",      "interaction.mass",     "interaction.N",        "interaction.weight",
    "interaction.line",      "interaction.mu0",      "channels.list",        "channels.l",
    "channels.J_max",        "energy.k",             "energy.k_range",       "energy.b_re",
    "energy.b_im",           "energy.sheet",         "energy.oracle",        "bound.lo",
    "bound.hi",              "bound.scan",           "amplitude.q",          "amplitude.order",
    "kernel.rho",            "kernel.u",             "kernel.u_range",       "tolerance.phase",
    "tolerance.unitarity",   "tolerance.bound",      "solver.order",         "solver.error_order",
    "solver.estimate_error", "solver.width",         "solver.geometric_from", "solver.ratio",
    "solver.s_max",          "solver.guard",         "solver.max_breaks",    "ode.r_min",
    "ode.r_max",             "ode.r_cap",            "ode.rtol",             "ode.atol",
    "ode.wronskian_tol",     "output.dir",           "output.name"};
const std::set<std::string> repeatable{"interaction.line"};

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::multimap<std::string, Entry> entries;
  std::string section, raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError(ln, s, "malformed section header");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(ln, s, "expected key = value");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!known_keys.count(full)) throw ConfigError(ln, full, "unknown key");
    if (entries.count(full) && !repeatable.count(full)) throw ConfigError(ln, full, "duplicate key");
    entries.emplace(full, Entry{trim(std::string_view(s).substr(eq + 1)), ln});
  }
  const Reader r(entries);

  RunConfig cfg;
  std::string canonical_text;
  for (auto& [k, e] : entries) {
    auto [it, fresh] = cfg.canonical.emplace(k, e.value);
    if (!fresh) it->second += "; " + e.value;
    canonical_text += k + "=" + e.value + "\n";
  }
  cfg.hash = fnv1a(canonical_text);

  // interaction
  if (auto* x = r.find("interaction.weight")) {
    std::filesystem::path p = x->value;
    if (p.is_relative()) p = base_dir / p;
    try {
      cfg.interaction = load_weight(p.string());
    } catch (const std::exception& e) {
      throw ConfigError(x->line, "interaction.weight", e.what());
    }
    cfg.weight_source = x->value;
    // the weight file is part of the run artifact
    std::ifstream wf(p);
    cfg.hash = fnv1a(canonical_text + std::string(std::istreambuf_iterator<char>(wf), {}));
    if (r.has("interaction.line"))
      throw ConfigError(r.line_of("interaction.line"), "interaction.line", "inline lines conflict with a weight file");
  } else {
    std::vector<WeightLine> lines;
    for (auto& e : r.all("interaction.line")) {
      auto t = tokens(e.value);
      if (t.size() != 2) throw ConfigError(e.line, "interaction.line", "expected 'g mu'");
      const double g = r.number("interaction.line", t[0], e.line), mu = r.number("interaction.line", t[1], e.line);
      if (!(mu > 0)) throw ConfigError(e.line, "interaction.line", "line mass must be positive");
      lines.push_back({g, mu});
    }
    std::sort(lines.begin(), lines.end(), [](auto& a, auto& b) { return a.mu < b.mu; });
    std::optional<double> mu0;
    if (auto* x = r.find("interaction.mu0")) mu0 = r.number("interaction.mu0", x->value, x->line);
    try {
      cfg.interaction.sigma = SpectralWeight(lines, {}, {}, mu0);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(r.line_of("interaction.line"), "interaction.line", e.what());
    }
  }
  if (auto* x = r.find("interaction.kind")) {
    try {
      cfg.interaction.kind = interaction_kind_from_string(x->value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(x->line, "interaction.kind", e.what());
    }
  }
  r.get("interaction.mass", cfg.interaction.mass);
  r.get("interaction.N", cfg.N);
  if (cfg.N < 2 || cfg.N > 64) throw ConfigError(r.line_of("interaction.N"), "interaction.N", "dimension must be >= 2");
  try {
    cfg.interaction.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(r.line_of("interaction.kind"), "interaction.kind", e.what());
  }

  // channels: "J:sign" items, Schroedinger l shortcut, or all channels up to J_max
  auto add_channel = [&](double J, Sign xi, const std::string& key) {
    try {
      cfg.channels.push_back(make_channel(cfg.N, J, xi));
    } catch (const std::exception& e) {
      throw ConfigError(r.line_of(key), key, e.what());
    }
  };
  if (auto* x = r.find("channels.list")) {
    for (auto& t : tokens(x->value)) {
      const auto colon = t.find(':');
      if (colon == std::string::npos) throw ConfigError(x->line, "channels.list", "expected J:sign, got '" + t + "'");
      add_channel(r.number("channels.list", t.substr(0, colon), x->line),
                  parse_sign("channels.list", t.substr(colon + 1), x->line), "channels.list");
    }
  }
  if (auto* x = r.find("channels.l")) {
    // Schroedinger wave l is the xi = -1 channel with l_xi = l
    const double a = 0.5 * (3 - cfg.N);
    for (double l : r.list("channels.l")) {
      if (l < 0 || l != std::round(l)) throw ConfigError(x->line, "channels.l", "l must be a nonnegative integer");
      add_channel(l - a + 0.5, Sign::minus(), "channels.l");
    }
  }
  if (auto* x = r.find("channels.J_max")) {
    const double Jmax = r.number("channels.J_max", x->value, x->line);
    const double lam = 0.5 * cfg.N - 1.0;
    if (Jmax < lam) throw ConfigError(x->line, "channels.J_max", "below the lowest J of this dimension");
    for (double J = lam; J <= Jmax + 1e-9; J += 1.0)
      for (Sign xi : {Sign::plus(), Sign::minus()}) {
        try {
          cfg.channels.push_back(make_channel(cfg.N, J, xi));
        } catch (const InvalidChannel&) {
        }
      }
  }

  // energies
  cfg.k = r.list("energy.k");
  {
    double lo, hi;
    int n;
    if (r.range("energy.k_range", lo, hi, n)) {
      auto extra = spaced(lo, hi, n);
      cfg.k.insert(cfg.k.end(), extra.begin(), extra.end());
    }
  }
  for (double k : cfg.k)
    if (!(k > 0)) throw ConfigError(r.line_of("energy.k"), "energy.k", "momenta must be positive");
  {
    const bool re = r.range("energy.b_re", cfg.b.re_lo, cfg.b.re_hi, cfg.b.re_n);
    const bool im = r.range("energy.b_im", cfg.b.im_lo, cfg.b.im_hi, cfg.b.im_n);
    if (re != im) throw ConfigError(r.line_of(re ? "energy.b_re" : "energy.b_im"), re ? "energy.b_im" : "energy.b_re",
                                    "the b rectangle needs both b_re and b_im");
  }
  if (auto* x = r.find("energy.sheet")) cfg.sheet = parse_sign("energy.sheet", x->value, x->line);
  r.get("energy.oracle", cfg.with_oracle);

  r.get("bound.lo", cfg.bound_lo);
  r.get("bound.hi", cfg.bound_hi);
  r.get("bound.scan", cfg.bound_scan);
  if (!(cfg.bound_lo > 0 && cfg.bound_hi > cfg.bound_lo))
    throw ConfigError(r.line_of("bound.hi"), "bound.hi", "need 0 < lo < hi");
  if (cfg.bound_scan < 10) throw ConfigError(r.line_of("bound.scan"), "bound.scan", "at least 10 scan points");

  cfg.q = r.list("amplitude.q");
  r.get("amplitude.order", cfg.amplitude_order);
  if (cfg.amplitude_order != 1 && cfg.amplitude_order != 2)
    throw ConfigError(r.line_of("amplitude.order"), "amplitude.order", "order must be 1 or 2");

  r.get("kernel.rho", cfg.kernel_rho);
  cfg.kernel_u = r.list("kernel.u");
  {
    double lo, hi;
    int n;
    if (r.range("kernel.u_range", lo, hi, n)) {
      auto extra = spaced(lo, hi, n);
      cfg.kernel_u.insert(cfg.kernel_u.end(), extra.begin(), extra.end());
    }
  }

  r.get("tolerance.phase", cfg.tol_phase);
  r.get("tolerance.unitarity", cfg.tol_unitarity);
  r.get("tolerance.bound", cfg.tol_bound);

  r.get("solver.order", cfg.solver.order);
  r.get("solver.error_order", cfg.solver.error_order);
  r.get("solver.estimate_error", cfg.solver.estimate_error);
  r.get("solver.width", cfg.solver.width);
  r.get("solver.geometric_from", cfg.solver.geometric_from);
  r.get("solver.ratio", cfg.solver.ratio);
  r.get("solver.s_max", cfg.solver.s_max);
  r.get("solver.guard", cfg.solver.guard);
  r.get("solver.max_breaks", cfg.solver.max_breaks);

  r.get("ode.r_min", cfg.ode.r_min);
  r.get("ode.r_max", cfg.ode.r_max);
  r.get("ode.r_cap", cfg.ode.r_cap);
  r.get("ode.rtol", cfg.ode.rtol);
  r.get("ode.atol", cfg.ode.atol);
  r.get("ode.wronskian_tol", cfg.ode.wronskian_tol);

  if (auto* x = r.find("output.dir")) {
    std::filesystem::path p = x->value;
    cfg.output_dir = p.is_relative() ? base_dir / p : p;
  }
  if (auto* x = r.find("output.name")) cfg.output_name = x->value;

  // per-section validators map their message to the offending field
  auto check = [&](const std::string& key, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(r.line_of(key), key, e.what());
    }
  };
  check("solver.order", [&] { cfg.solver.validate(); });
  check("ode.rtol", [&] { cfg.ode.validate(); });
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0)) throw ConfigError(0, field, "tolerance must be positive");
  };
  positive(tol_phase, "tolerance.phase");
  positive(tol_unitarity, "tolerance.unitarity");
  positive(tol_bound, "tolerance.bound");
  for (auto& ch : channels) {
    if (ch.N != N) throw ConfigError(0, "channels", "channel " + ch.id() + " does not match N");
    if (interaction.is_dirac() && N != 3) throw ConfigError(0, "interaction.N", "Dirac kinds need N = 3");
  }
  if (!(kernel_rho > 0)) throw ConfigError(0, "kernel.rho", "must be positive");
  for (double q : this->q)
    if (!(q > 0)) throw ConfigError(0, "amplitude.q", "momenta must be positive");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, path.string(), "cannot open config file");
  return parse_config(in, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace jost::cli
