#include "jost/potential.hpp"

#include "jost/quadrature.hpp"
#include "jost/specfun.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

namespace jost {

namespace {
constexpr double pi = std::numbers::pi;

double parse_number(const std::string& tok, int line) {
  double v = 0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v)) throw WeightParseError(line, "not a finite number: '" + tok + "'");
  return v;
}
}  // namespace

// ---------------------------------------------------------------- weight

SpectralWeight::SpectralWeight(std::vector<WeightLine> lines, std::vector<WeightSample> continuum,
                               std::vector<WeightRamp> ramps, std::optional<double> mu0)
    : lines_(std::move(lines)), cont_(std::move(continuum)), ramps_(std::move(ramps)) {
  std::sort(lines_.begin(), lines_.end(), [](auto& a, auto& b) { return a.mu < b.mu; });
  double inf = std::numeric_limits<double>::infinity();
  for (auto& l : lines_) {
    if (!(l.mu > 0)) throw std::invalid_argument("spectral line mass must be positive");
    inf = std::min(inf, l.mu);
  }
  for (std::size_t i = 0; i < cont_.size(); ++i) {
    if (!(cont_[i].nu >= 0)) throw std::invalid_argument("continuum sample below zero");
    if (i > 0 && !(cont_[i].nu > cont_[i - 1].nu))
      throw std::invalid_argument("continuum samples must be strictly increasing in nu");
  }
  if (cont_.size() == 1) throw std::invalid_argument("continuum needs at least two samples");
  if (!cont_.empty()) {
    // support starts at the first nonzero stretch
    std::size_t k = 0;
    while (k + 1 < cont_.size() && cont_[k].sigma == 0.0 && cont_[k + 1].sigma == 0.0) ++k;
    inf = std::min(inf, cont_[k].nu);
  }
  for (auto& r : ramps_) {
    if (!(r.start > 0)) throw std::invalid_argument("ramp start must be positive");
    inf = std::min(inf, r.start);
  }
  if (mu0) {
    if (*mu0 < 0) throw std::invalid_argument("mu0 must be nonnegative");
    if (*mu0 > inf + 1e-12) throw std::invalid_argument("mu0 exceeds the start of the support");
    mu0_ = *mu0;
  } else {
    mu0_ = std::isfinite(inf) ? inf : 0.0;
  }
}

double SpectralWeight::smooth_density(double nu) const {
  double s = 0;
  for (auto& r : ramps_)
    if (nu >= r.start) s += r.slope * nu;
  if (cont_.size() >= 2 && nu >= cont_.front().nu && nu <= cont_.back().nu) {
    auto it = std::upper_bound(cont_.begin(), cont_.end(), nu, [](double x, const WeightSample& w) { return x < w.nu; });
    if (it == cont_.end()) return s + cont_.back().sigma;
    auto lo = it - 1;
    const double t = (nu - lo->nu) / (it->nu - lo->nu);
    s += lo->sigma + t * (it->sigma - lo->sigma);
  }
  return s;
}

std::vector<double> SpectralWeight::smooth_knots() const {
  std::vector<double> k;
  for (auto& c : cont_) k.push_back(c.nu);
  for (auto& r : ramps_) k.push_back(r.start);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

double SpectralWeight::integrate_smooth(double lo, double hi, const std::function<double(double)>& f, int order) const {
  if (!(hi > lo) || (cont_.empty() && ramps_.empty())) return 0.0;
  std::vector<double> cuts{lo, hi};
  for (double k : smooth_knots())
    if (k > lo && k < hi) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  const GaussRule& g = GaussRule::get(order);
  double acc = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double c = 0.5 * (cuts[i] + cuts[i + 1]), h = 0.5 * (cuts[i + 1] - cuts[i]);
    for (int q = 0; q < order; ++q) {
      const double nu = c + h * g.x[q];
      const double s = smooth_density(nu);
      if (s != 0.0) acc += h * g.w[q] * s * f(nu);
    }
  }
  return acc;
}

SpectralWeight SpectralWeight::scaled(double factor) const {
  auto l = lines_;
  for (auto& x : l) x.g *= factor;
  auto c = cont_;
  for (auto& x : c) x.sigma *= factor;
  auto r = ramps_;
  for (auto& x : r) x.slope *= factor;
  return SpectralWeight(l, c, r, mu0_);
}

SpectralWeight SpectralWeight::plus(const SpectralWeight& o) const {
  auto l = lines_;
  l.insert(l.end(), o.lines_.begin(), o.lines_.end());
  auto r = ramps_;
  r.insert(r.end(), o.ramps_.begin(), o.ramps_.end());
  std::vector<WeightSample> c;
  if (cont_.empty()) {
    c = o.cont_;
  } else if (o.cont_.empty()) {
    c = cont_;
  } else {
    std::vector<double> nus;
    for (auto& x : cont_) nus.push_back(x.nu);
    for (auto& x : o.cont_) nus.push_back(x.nu);
    std::sort(nus.begin(), nus.end());
    nus.erase(std::unique(nus.begin(), nus.end()), nus.end());
    SpectralWeight a({}, cont_), b({}, o.cont_);
    for (double nu : nus) c.push_back({nu, a.smooth_density(nu) + b.smooth_density(nu)});
  }
  const bool any = !empty() || !o.empty();
  return SpectralWeight(l, c, r, any ? std::optional<double>(std::min(empty() ? o.mu0_ : mu0_, o.empty() ? mu0_ : o.mu0_)) : std::nullopt);
}

// ---------------------------------------------------------------- kinds

std::string to_string(InteractionKind k) {
  switch (k) {
    case InteractionKind::SchrodingerLocal: return "schrodinger";
    case InteractionKind::DiracVector: return "dirac-vector";
    case InteractionKind::DiracScalar: return "dirac-scalar";
    case InteractionKind::SchrodingerRelCorr: return "relcorr";
    case InteractionKind::SchrodingerNonlocal: return "nonlocal";
  }
  return "?";
}

InteractionKind interaction_kind_from_string(const std::string& s) {
  static const std::map<std::string, InteractionKind> table{
      {"schrodinger", InteractionKind::SchrodingerLocal}, {"dirac-vector", InteractionKind::DiracVector},
      {"dirac-scalar", InteractionKind::DiracScalar},     {"relcorr", InteractionKind::SchrodingerRelCorr},
      {"nonlocal", InteractionKind::SchrodingerNonlocal}};
  auto it = table.find(s);
  if (it == table.end()) throw std::invalid_argument("unknown interaction kind '" + s + "'");
  return it->second;
}

void Interaction::validate() const {
  const bool needs_mass = kind != InteractionKind::SchrodingerLocal;
  if (needs_mass && !(mass > 0)) throw std::invalid_argument("interaction kind " + to_string(kind) + " needs a positive mass");
  if (is_dirac() && !sigma.ramps().empty())
    throw std::invalid_argument("Dirac kinds need a subtraction-free weight (no unbounded ramps)");
  if (kind != InteractionKind::SchrodingerNonlocal && !sigma2.empty())
    throw std::invalid_argument("second weight is only meaningful for the nonlocal kind");
}

WeightParseError::WeightParseError(int ln, const std::string& what)
    : std::runtime_error("weight file line " + std::to_string(ln) + ": " + what), line(ln) {}

Interaction parse_weight(std::istream& in) {
  Interaction out;
  std::vector<WeightLine> l1, l2;
  std::vector<WeightSample> c1, c2;
  std::optional<double> mu0;
  bool have_kind = false;
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream ss(raw);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto need = [&](std::size_t n) {
      if (tok.size() != n) throw WeightParseError(ln, "'" + key + "' expects " + std::to_string(n - 1) + " value(s)");
    };
    if (key == "line" || key == "line2") {
      need(3);
      const double g = parse_number(tok[1], ln), mu = parse_number(tok[2], ln);
      if (!(mu > 0)) throw WeightParseError(ln, "line mass must be positive");
      (key == "line" ? l1 : l2).push_back({g, mu});
    } else if (key == "cont" || key == "cont2") {
      need(3);
      auto& c = key == "cont" ? c1 : c2;
      const double nu = parse_number(tok[1], ln), s = parse_number(tok[2], ln);
      if (nu < 0) throw WeightParseError(ln, "continuum nu must be nonnegative");
      if (!c.empty() && !(nu > c.back().nu)) throw WeightParseError(ln, "continuum nu must increase strictly");
      c.push_back({nu, s});
    } else if (key == "mu0") {
      need(2);
      if (mu0) throw WeightParseError(ln, "duplicate mu0");
      mu0 = parse_number(tok[1], ln);
      if (*mu0 < 0) throw WeightParseError(ln, "mu0 must be nonnegative");
    } else if (key == "kind") {
      if (tok.size() != 2 && tok.size() != 3) throw WeightParseError(ln, "'kind' expects a tag and an optional mass");
      if (have_kind) throw WeightParseError(ln, "duplicate kind");
      have_kind = true;
      try {
        out.kind = interaction_kind_from_string(tok[1]);
      } catch (const std::invalid_argument& e) {
        throw WeightParseError(ln, e.what());
      }
      if (tok.size() == 3) out.mass = parse_number(tok[2], ln);
    } else {
      throw WeightParseError(ln, "unknown record '" + key + "'");
    }
  }
  if (c1.size() == 1 || c2.size() == 1) throw WeightParseError(ln, "a continuum needs at least two samples");
  try {
    out.sigma = SpectralWeight(l1, c1, {}, mu0);
    out.sigma2 = SpectralWeight(l2, c2);
    out.validate();
  } catch (const std::invalid_argument& e) {
    throw WeightParseError(ln, e.what());
  }
  if (out.kind != InteractionKind::SchrodingerNonlocal && (!l2.empty() || !c2.empty()))
    throw WeightParseError(ln, "line2/cont2 records need kind nonlocal");
  return out;
}

Interaction load_weight(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw WeightParseError(0, "cannot open '" + path + "'");
  return parse_weight(f);
}

// ---------------------------------------------------------------- potentials

double evaluate_potential(const SpectralWeight& w, int N, double r) {
  if (!(r > 0)) throw DomainError("evaluate_potential: r must be positive");
  if (N == 3) {
    double v = 0;
    for (auto& l : w.lines()) v += l.g * std::exp(-l.mu * r);
    for (auto& rp : w.ramps()) v += rp.slope * std::exp(-rp.start * r) * (rp.start / r + 1.0 / (r * r));
    const auto& c = w.continuum();
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      // int (A + k nu) e^{-nu r} = -e^{-nu r} [(A + k nu)/r + k/r^2]
      const double k = (c[i + 1].sigma - c[i].sigma) / (c[i + 1].nu - c[i].nu);
      const double A = c[i].sigma - k * c[i].nu;
      auto F = [&](double nu) { return -std::exp(-nu * r) * ((A + k * nu) / r + k / (r * r)); };
      v += F(c[i + 1].nu) - F(c[i].nu);
    }
    return v / r;
  }
  if (!w.ramps().empty()) throw DomainError("evaluate_potential: ramps are supported for N = 3 only");
  const double a = 0.5 * (3 - N);
  const double pref = 4.0 * pi / (sphere_area(N) * std::pow(pi, a) * r);
  auto radial = [&](double nu) { return std::pow(r / (2.0 * nu), a) * chi(-a, nu * r); };
  double v = 0;
  for (auto& l : w.lines()) v += l.g * radial(l.mu);
  v += w.integrate_smooth(w.mu0(), w.continuum().empty() ? w.mu0() : w.continuum().back().nu, radial, 24);
  return pref * v;
}

double potential_momentum(const SpectralWeight& w, int N, double Q) {
  if (!w.ramps().empty()) throw DivergenceError("potential_momentum: unbounded ramp");
  const double pref = 2.0 / (pi * sphere_area(N));
  double v = 0;
  for (auto& l : w.lines()) v += l.g / (l.mu * l.mu + Q * Q);
  if (!w.continuum().empty())
    v += w.integrate_smooth(w.continuum().front().nu, w.continuum().back().nu,
                            [&](double nu) { return 1.0 / (nu * nu + Q * Q); }, 24);
  return pref * v;
}

double moments(const SpectralWeight& w, int n) {
  if (n < 0) throw DomainError("moments: order must be nonnegative");
  for (auto& r : w.ramps())
    if (r.slope != 0.0) throw DivergenceError("moments: unbounded ramp makes I_n diverge");
  double s = 0;
  for (auto& l : w.lines()) s += l.g * std::pow(l.mu, n);
  if (!w.continuum().empty())
    s += w.integrate_smooth(w.continuum().front().nu, w.continuum().back().nu,
                            [&](double nu) { return std::pow(nu, n); }, std::max(4, n / 2 + 3));
  return s;
}

// ---------------------------------------------------------------- Weyl

namespace {

// G(x) = int_{mu0}^{nu} dgamma (nu^2 - gamma^2)^{alpha-1} / Gamma(alpha) Sigma(gamma)
double riemann_liouville(const SpectralWeight& w, double alpha, double nu) {
  const double lo = w.mu0();
  if (!(nu > lo)) return 0.0;
  if (std::abs(alpha - std::round(alpha)) < 1e-12 && alpha >= 1.0) {
    const int p = static_cast<int>(std::lround(alpha)) - 1;
    const double ga = std::tgamma(alpha);
    return w.integrate_smooth(lo, nu, [&](double g) { return std::pow(nu * nu - g * g, p) / ga; },
                              std::max(8, p + 4));
  }
  // 0 < alpha < 1 or half-integer: singular weight at the upper end.
  std::vector<double> cuts{lo};
  for (double k : w.smooth_knots())
    if (k > lo && k < nu) cuts.push_back(k);
  const double last = cuts.back();
  double acc = 0;
  if (cuts.size() > 1) {
    // regular part: [lo, last]
    acc += w.integrate_smooth(lo, last, [&](double g) { return std::pow(nu * nu - g * g, alpha - 1.0); }, 24);
  }
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  struct P { const SpectralWeight* w; double nu, alpha; } prm{&w, nu, alpha};
  gsl_function f;
  f.function = [](double g, void* v) {
    auto* q = static_cast<P*>(v);
    return std::pow(q->nu + g, q->alpha - 1.0) * q->w->smooth_density(g);
  };
  f.params = &prm;
  const std::size_t limit = 500;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(limit);
  gsl_integration_qaws_table* tab = gsl_integration_qaws_table_alloc(0.0, alpha - 1.0, 0, 0);
  double res = 0, err = 0;
  gsl_integration_qaws(&f, last, nu, tab, 0.0, 1e-13, limit, ws, &res, &err);
  gsl_integration_qaws_table_free(tab);
  gsl_integration_workspace_free(ws);
  gsl_set_error_handler(old);
  acc += res;
  return acc / std::tgamma(alpha);
}

}  // namespace

SpectralWeight weyl_transform(const SpectralWeight& w, int N, int D, int n, std::vector<double> nu_out) {
  if (!w.lines().empty()) throw DomainError("weyl_transform: delta lines have no function image; smear them first");
  if (!w.ramps().empty()) throw DomainError("weyl_transform: ramps are not supported");
  if (n < 0 || 2 * n < D - N) throw DomainError("weyl_transform: n below the convergence bound max((D-N)/2, 0)");
  if (n > 2) throw DomainError("weyl_transform: at most two nu^2-derivatives are supported");
  const double aN = 0.5 * (3 - N), aD = 0.5 * (3 - D);
  const double alpha = aD - aN + n;
  if (alpha < -1e-12) throw DomainError("weyl_transform: negative integral order");
  if (nu_out.empty())
    for (auto& s : w.continuum()) nu_out.push_back(s.nu);
  if (w.continuum().empty()) return SpectralWeight({}, {}, {}, w.mu0());
  const double pref = std::tgamma(0.5 * N) / std::tgamma(0.5 * D);

  // G as a function of x = nu^2
  auto G = [&](double x) {
    if (x <= w.mu0() * w.mu0()) return 0.0;
    const double nu = std::sqrt(x);
    if (std::abs(alpha) < 1e-12) return w.smooth_density(nu) / (2.0 * nu);
    return riemann_liouville(w, alpha, nu);
  };
  std::vector<WeightSample> out;
  for (double nu : nu_out) {
    if (nu <= w.mu0()) {
      out.push_back({nu, 0.0});
      continue;
    }
    const double x = nu * nu;
    double d = 0;
    if (n == 0) {
      d = G(x);
    } else {
      const double h = (n == 1 ? 2e-4 : 2e-3) * x;
      const double gp2 = G(x + 2 * h), gp1 = G(x + h), gm1 = G(x - h), gm2 = G(x - 2 * h);
      if (n == 1)
        d = (-gp2 + 8 * gp1 - 8 * gm1 + gm2) / (12 * h);
      else
        d = (-gp2 + 16 * gp1 - 30 * G(x) + 16 * gm1 - gm2) / (12 * h * h);
    }
    out.push_back({nu, pref * 2.0 * nu * d});
  }
  return SpectralWeight({}, out, {}, w.mu0());
}

SpectralWeight relcorr_weight(const SpectralWeight& w, const Channel& ch, double m) {
  if (ch.N != 3) throw DomainError("relcorr_weight: N = 3 only");
  if (!w.ramps().empty()) throw DomainError("relcorr_weight: input ramps are not supported");
  if (!(m > 0)) throw DomainError("relcorr_weight: mass must be positive");
  const double c = 1.0 / (4.0 * m * m);
  const double kap1 = 1.0 + ch.kappa();
  std::vector<WeightLine> lines;
  std::vector<WeightRamp> ramps;
  for (auto& l : w.lines()) {
    lines.push_back({l.g * (1.0 + 0.5 * c * l.mu * l.mu), l.mu});
    if (kap1 != 0.0) ramps.push_back({kap1 * c * l.g, l.mu});
  }
  std::vector<WeightSample> cont;
  const auto& s = w.continuum();
  if (!s.empty()) {
    double cum = 0;
    std::vector<double> cumv{0.0};
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      cum += 0.5 * (s[i].sigma + s[i + 1].sigma) * (s[i + 1].nu - s[i].nu);
      cumv.push_back(cum);
    }
    const double I0 = cum;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double nu = s[i].nu;
      cont.push_back({nu, s[i].sigma * (1.0 + 0.5 * c * nu * nu) + kap1 * c * nu * (cumv[i] - I0)});
    }
    if (kap1 != 0.0 && I0 != 0.0) ramps.push_back({kap1 * c * I0, s.front().nu});
  }
  return SpectralWeight(lines, cont, ramps, w.mu0());
}

}  // namespace jost
