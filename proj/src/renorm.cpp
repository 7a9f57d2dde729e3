#include "jost/renorm.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace jost {

double partial_potential_relcorr(const SpectralWeight& w, const Channel& ch, double m, double r) {
  if (!(r > 0)) throw std::invalid_argument("partial_potential_relcorr: r must be positive");
  return evaluate_potential(relcorr_weight(w, ch, m), 3, r);
}

double relcorr_contact_coefficient(const SpectralWeight& w, double m) {
  return -moments(w, 0) / (2.0 * 4.0 * m * m);
}

ConvergenceReport convergence_conditions(const SpectralWeight& w2, double tol) {
  ConvergenceReport r;
  if (!w2.ramps().empty()) return r;  // I_0 diverges
  double scale = 1.0;
  for (auto& l : w2.lines()) scale += std::abs(l.g);
  r.I0 = moments(w2, 0);
  r.I1 = moments(w2, 1);
  r.ok = std::abs(r.I0) <= tol * scale && std::isfinite(r.I1);
  return r;
}

// ------------------------------------------------------------ asymptotics

cplx KernelAsymptotics::exponent(double x, cplx b2) const {
  const GaussRule& gr = GaussRule::get(16);
  // panels geometric in a keep the power law resolved
  const double lo = std::min(x0, x), hi = std::max(x0, x);
  const int panels = std::max(1, static_cast<int>(std::ceil(std::log2(hi / lo) * 2.0)));
  const double ratio = std::pow(hi / lo, 1.0 / panels);
  cplx acc = 0;
  double a = lo;
  for (int p = 0; p < panels; ++p) {
    const double c = a * ratio, h = 0.5 * (c - a);
    for (int i = 0; i < 16; ++i) {
      const double t = a + h * (1.0 + gr.x[i]);
      acc += h * gr.w[i] * U(t) * R(t) / (t * t - b2);
    }
    a = c;
  }
  return x >= x0 ? acc : -acc;
}

namespace {

double scalar_kernel(const ChannelKernel& K, double u, double rho) {
  cplx v[1];
  K.full_block(u, rho, v);
  return v[0].real();
}

// least-squares power law c x^p through (x_i, |y_i|)
std::pair<double, double> power_fit(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double c = std::exp((sy - p * sx) / n);
  return {c * (y.front() < 0 ? -1.0 : 1.0), p};
}

template <class F>
double gsl_call(double x, void* p) {
  return (*static_cast<F*>(p))(x);
}

struct Workspace {
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(1000);
  Workspace() = default;
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  ~Workspace() {
    gsl_integration_workspace_free(ws);
    gsl_set_error_handler(old);
  }
};

// Neville extrapolation of y(x) to x = 0.
cplx extrapolate(const std::vector<double>& x, const std::vector<cplx>& y) {
  std::vector<cplx> P(y);
  const std::size_t n = x.size();
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = 0; i + k < n; ++i) P[i] = (x[i + k] * P[i] - x[i] * P[i + 1]) / (x[i + k] - x[i]);
  return P[0];
}

}  // namespace

KernelAsymptotics fit_asymptotics(const ChannelKernel& K, double u_lo, double u_hi, double rho_lo, double rho_hi,
                                  int samples) {
  if (K.dim() != 1) throw std::invalid_argument("fit_asymptotics: Schroedinger-form kernels only");
  if (!(u_hi > u_lo && rho_hi > rho_lo && rho_lo > 0 && u_lo > rho_hi + K.mu0()) || samples < 3)
    throw std::invalid_argument("fit_asymptotics: need rho_lo > 0, u_lo > rho_hi + mu0 and >= 3 samples");
  std::vector<double> us(samples), rs(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    us[i] = u_lo * std::pow(u_hi / u_lo, t);
    rs[i] = rho_lo * std::pow(rho_hi / rho_lo, t);
  }
  std::vector<double> M(samples * samples);
  double norm2 = 0;
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      M[i * samples + j] = scalar_kernel(K, us[i], rs[j]);
      norm2 += M[i * samples + j] * M[i * samples + j];
    }
  KernelAsymptotics a;
  a.x0 = K.mu0();
  if (norm2 == 0.0) return a;
  // power iteration for the leading singular pair
  std::vector<double> v(samples, 1.0), u(samples);
  double sigma = 0;
  for (int it = 0; it < 200; ++it) {
    for (int i = 0; i < samples; ++i) {
      u[i] = 0;
      for (int j = 0; j < samples; ++j) u[i] += M[i * samples + j] * v[j];
    }
    std::vector<double> nv(samples, 0.0);
    for (int j = 0; j < samples; ++j)
      for (int i = 0; i < samples; ++i) nv[j] += M[i * samples + j] * u[i];
    double n = 0;
    for (double x : nv) n += x * x;
    n = std::sqrt(n);
    if (n == 0.0) return a;
    for (int j = 0; j < samples; ++j) nv[j] /= n;
    double change = 0;
    for (int j = 0; j < samples; ++j) change = std::max(change, std::abs(nv[j] - v[j]));
    v = nv;
    sigma = std::sqrt(n);
    if (change < 1e-14) break;
  }
  if (v.front() < 0)
    for (double& x : v) x = -x;
  for (int i = 0; i < samples; ++i) {
    u[i] = 0;
    for (int j = 0; j < samples; ++j) u[i] += M[i * samples + j] * v[j];
  }
  double res = 0;
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      const double d = M[i * samples + j] - u[i] * v[j];
      res += d * d;
    }
  a.residual = std::sqrt(res / norm2);
  (void)sigma;
  bool same_sign = true;
  for (int i = 1; i < samples; ++i) same_sign &= (u[i] > 0) == (u[0] > 0) && u[i] != 0.0;
  for (int j = 1; j < samples; ++j) same_sign &= (v[j] > 0) == (v[0] > 0) && v[j] != 0.0;
  if (!same_sign || u[0] == 0.0) return a;
  std::tie(a.cu, a.pu) = power_fit(us, u);
  std::tie(a.cr, a.pr) = power_fit(rs, v);
  return a;
}

// ------------------------------------------------------------ regulators

std::string to_string(RegulatorKind k) {
  switch (k) {
    case RegulatorKind::Unit: return "unit";
    case RegulatorKind::Rational: return "rational";
    case RegulatorKind::Exponential: return "exponential";
  }
  return "?";
}

RegulatorKind regulator_kind_from_string(const std::string& s) {
  if (s == "unit") return RegulatorKind::Unit;
  if (s == "rational") return RegulatorKind::Rational;
  if (s == "exponential") return RegulatorKind::Exponential;
  throw std::invalid_argument("unknown regulator '" + s + "' (unit, rational, exponential)");
}

void RegulatorConfig::validate(double mu0) const {
  if (steps < 3) throw std::invalid_argument("regulator: ladder needs at least 3 cutoffs");
  if (!(lambda1 > 4.0 * mu0)) throw std::invalid_argument("regulator: first cutoff must exceed 4 mu0");
  if (order != 0 && (order < 2 || order > steps)) throw std::invalid_argument("regulator: order must lie in [2, steps]");
  if (power < 0) throw std::invalid_argument("regulator: power must be nonnegative");
  if (reference < 0) throw std::invalid_argument("regulator: reference must be nonnegative");
  solver.validate();
}

std::vector<double> RegulatorConfig::ladder() const {
  std::vector<double> l;
  for (int j = 0; j < steps; ++j) l.push_back(lambda1 * std::ldexp(1.0, j));
  return l;
}

double RegulatorConfig::expansion_power() const {
  if (power > 0) return power;
  return kind == RegulatorKind::Unit ? 2.0 : 1.0;
}

namespace {

struct Regulator {
  RegulatorKind kind;
  double lambda;
  const KernelAsymptotics* asym;
  cplx b2;

  cplx operator()(cplx x) const {
    switch (kind) {
      case RegulatorKind::Unit: return 1.0;
      case RegulatorKind::Rational: return lambda * lambda / (lambda * lambda + x * x);
      case RegulatorKind::Exponential: {
        const cplx O = asym->exponent(std::abs(x), b2);
        return std::exp(-std::exp(O - std::log(lambda))) / lambda;
      }
    }
    return 1.0;
  }
};

// Regulated integral along the ray from rho.
cplx regulated_member(const ChannelKernel& K, const EnergyPoint& e, cplx rho, const Regulator& M, double s_end,
                      const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.s_max = s_end;
  const RaySolution ray = solve_ray(K, e, rho, 0, Direction::Up, c);
  const double L = K.exponent();
  cplx G[1];
  auto f = [&](double s, cplx a) {
    const cplx u = ray.point(s);
    K.propagator(u, e, G);
    return std::pow(rho / u, L) * G[0] * a * M(u);
  };
  cplx sum = M(rho);
  for (std::size_t p = 0; p < ray.panels.size(); ++p)
    for (int q = 0; q < ray.order; ++q) sum += ray.panels[p].w[q] * f(ray.panels[p].x[q], ray.at(p, q, 0));
  if (!ray.panels.empty()) {
    const double S = ray.end();
    cplx aS[1];
    ray.eval(S, aS);
    // integrand ~ u^-2 (unit) or u^-4 (rational) beyond S
    if (M.kind == RegulatorKind::Unit) sum += f(S, aS[0]) * ray.point(S);
    if (M.kind == RegulatorKind::Rational) sum += f(S, aS[0]) * ray.point(S) / 3.0;
  }
  return sum;
}

}  // namespace

RenormalizedResult renormalized_osjf(const ChannelKernel& K, const EnergyPoint& e, cplx rho,
                                     const RegulatorConfig& reg) {
  if (K.dim() != 1) throw std::invalid_argument("renormalized_osjf: Schroedinger-form kernels only");
  reg.validate(K.mu0());
  KernelAsymptotics asym;
  if (reg.kind == RegulatorKind::Exponential) {
    const double mu0 = K.mu0();
    const double r0 = std::max(std::abs(rho), mu0);
    asym = fit_asymptotics(K, 20.0 * (r0 + mu0), 80.0 * (r0 + mu0), 0.5 * r0, 2.0 * r0);
    if (!asym.singular()) throw RenormalizationError("exponential regulator needs a singular repulsive kernel");
  }
  const cplx b2 = e.b * e.b;
  RenormalizedResult out;
  const auto ladder = reg.ladder();
  for (double lam : ladder) {
    const Regulator M{reg.kind, lam, &asym, b2};
    double s_end = lam;
    if (reg.kind == RegulatorKind::Rational) s_end = 64.0 * lam;
    if (reg.kind == RegulatorKind::Exponential) {
      // exp(O(u)) / Lambda reaches 60: the regulator is below e^-60 beyond
      const double target = std::log(lam) + std::log(60.0);
      double hi = std::abs(rho) + 2.0 * K.mu0();
      while (asym.exponent(hi, b2).real() < target) {
        hi *= 1.5;
        if (hi > 1e6) throw RenormalizationError("exponential regulator: cutoff point beyond u = 1e6");
      }
      s_end = hi;
    }
    cplx v = regulated_member(K, e, rho, M, s_end, reg.solver);
    if (reg.reference > 0) v /= regulated_member(K, e, cplx(reg.reference), M, s_end, reg.solver);
    out.members.push_back(v);
    out.regulator_at_rho = M(rho);
  }
  // a non-Cauchy ladder: successive changes grow
  std::vector<double> diffs;
  for (std::size_t j = 1; j < out.members.size(); ++j) diffs.push_back(std::abs(out.members[j] - out.members[j - 1]));
  const double scale = std::max(1.0, std::abs(out.members.back())) * 1e-13;
  if (diffs.back() > scale && diffs.back() > diffs.front())
    throw RenormalizationError("renormalized_osjf: cutoff ladder is not Cauchy (changes grow)");

  const double p = reg.expansion_power();
  const std::size_t use = reg.order > 0 ? static_cast<std::size_t>(reg.order) : ladder.size();
  std::vector<double> x;
  std::vector<cplx> y;
  for (std::size_t j = ladder.size() - use; j < ladder.size(); ++j) {
    x.push_back(std::pow(ladder[j], -p));
    y.push_back(out.members[j]);
  }
  out.value = extrapolate(x, y);
  const cplx prev = extrapolate(std::vector<double>(x.begin(), x.end() - 1), std::vector<cplx>(y.begin(), y.end() - 1));
  out.spread = std::abs(out.value - prev);
  return out;
}

// ------------------------------------------------------------ homogeneous

HomogeneousResult homogeneous_osjf(const ChannelKernel& K, const EnergyPoint& e, std::vector<double> rho,
                                   double u_max, const SolverConfig& cfg) {
  if (K.dim() != 1) throw std::invalid_argument("homogeneous_osjf: Schroedinger-form kernels only");
  if (e.b.imag() != 0.0) throw std::invalid_argument("homogeneous_osjf: real b only");
  if (rho.empty()) throw std::invalid_argument("homogeneous_osjf: no start points");
  const double mu0 = K.mu0();
  const double rmax = *std::max_element(rho.begin(), rho.end());
  const double rmin = *std::min_element(rho.begin(), rho.end());
  if (!(rmin > 0)) throw std::invalid_argument("homogeneous_osjf: start points must be positive");
  if (!(u_max > 8.0 * (rmax + mu0))) throw std::invalid_argument("homogeneous_osjf: u_max too small for the fit");
  HomogeneousResult h;
  h.rho = rho;
  h.asymptotics = fit_asymptotics(K, 0.25 * u_max, u_max, rmin, std::max(rmax, 1.5 * rmin));
  const cplx b2 = e.b * e.b;
  if (!h.asymptotics.singular()) {
    h.trivial = true;
    h.values.assign(rho.size(), 0.0);
    h.ratios.assign(rho.size(), 0.0);
    return h;
  }
  auto A = [&](double u) { return h.asymptotics.U(u) * std::exp(h.asymptotics.exponent(u, b2).real()); };
  for (double u : {u_max / 8, u_max / 4, u_max / 2, u_max}) h.condition.push_back(std::abs(scalar_kernel(K, u, rho[0]) / A(u)));
  for (std::size_t i = 1; i < h.condition.size(); ++i)
    if (!(h.condition[i] < h.condition[i - 1]))
      throw RenormalizationError("homogeneous_osjf: K / A does not decrease along the u ladder");
  std::vector<double> half;
  SolverConfig c = cfg;
  for (double r : rho) {
    c.s_max = u_max - r;
    const RaySolution ray = solve_ray(K, e, r, 0, Direction::Up, c);
    cplx a[1], ah[1];
    ray.eval(u_max - r, a);
    ray.eval(0.5 * u_max - r, ah);
    h.values.push_back(a[0].real() / A(u_max));
    half.push_back(ah[0].real() / A(0.5 * u_max));
  }
  for (std::size_t j = 0; j < rho.size(); ++j) {
    h.ratios.push_back(h.values[j] / h.values[0]);
    const double rh = half[j] / half[0];
    h.spread = std::max(h.spread, std::abs(h.ratios[j] - rh) / std::abs(h.ratios[j]));
  }
  if (h.spread > 1e-2) throw RenormalizationError("homogeneous_osjf: asymptotic regime not reached; extend u_max");
  return h;
}

std::vector<double> oracle_homogeneous(const SpectralWeight& w, int l, double b, const std::vector<double>& rho,
                                       const OdeConfig& cfg) {
  if (rho.empty()) return {};
  const double rlo = *std::min_element(rho.begin(), rho.end());
  if (!(rlo > b && b > 0)) throw std::invalid_argument("oracle_homogeneous: need 0 < b < rho");
  const double R = std::min(cfg.r_cap, 60.0 / (rlo - b));
  const int n = 20001;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = cfg.r_min * std::pow(R / cfg.r_min, static_cast<double>(i) / (n - 1));
  auto V = [&](double r) { return evaluate_potential(w, 3, r); };
  const RadialSolution phi = schrodinger_recessive_solution(l, V, cplx(-b * b), cfg, grid);
  // normalize on the last point to keep the scale finite
  const cplx ref = phi.log_scale.back();
  std::vector<double> out;
  for (double r : rho) {
    // Simpson on the geometric grid in t = ln r
    const double h = std::log(R / cfg.r_min) / (n - 1);
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      const double wgt = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const cplx v = phi.values[i] * std::exp(phi.log_scale[i] - ref) * chi(l, cplx(r * grid[i]));
      acc += wgt * v.real() * grid[i];
    }
    out.push_back((r * r - b * b) * acc * h / 3.0);
  }
  return out;
}

// ------------------------------------------------------------ difference

DifferenceCheck auxiliary_difference(const ChannelKernel& K, double rho, double s, double k) {
  if (K.dim() != 1) throw std::invalid_argument("auxiliary_difference: Schroedinger-form kernels only");
  const double L = K.exponent();
  const double a0 = rho + K.mu0();
  std::vector<double> pts;
  for (double b : K.breakpoints(40.0 * K.mu0(), 200)) pts.push_back(rho + b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto H = [&](double x) {
    return [&, x](double a) { return scalar_kernel(K, a, rho) * std::pow(rho / a, L) / (a * a + x * x); };
  };
  auto diff = [&](double a) { return (k * k - s * s) * H(s)(a) / (a * a + k * k); };
  Workspace ws;
  // integral over [a0, hi] split at the kernel breakpoints
  auto finite = [&](auto&& f, double hi) {
    std::vector<double> cut{a0};
    for (double p : pts)
      if (p > a0 && p < hi) cut.push_back(p);
    cut.push_back(hi);
    double total = 0, res = 0, err = 0;
    for (std::size_t i = 0; i + 1 < cut.size(); ++i) {
      gsl_function g{&gsl_call<std::remove_reference_t<decltype(f)>>, &f};
      gsl_integration_qags(&g, cut[i], cut[i + 1], 0.0, 1e-12, 1000, ws.ws, &res, &err);
      total += res;
    }
    return total;
  };
  DifferenceCheck d;
  {
    const double top = pts.empty() ? a0 + 1.0 : std::max(pts.back(), a0 + 1.0);
    double tail = 0, err = 0;
    gsl_function g{&gsl_call<decltype(diff)>, &diff};
    gsl_integration_qagiu(&g, top, 0.0, 1e-12, 1000, ws.ws, &tail, &err);
    d.direct = finite(diff, top) + tail;
  }
  std::vector<double> x;
  std::vector<cplx> y;
  auto hs = H(s), hk = H(k);
  for (int j = 0; j < 6; ++j) {
    const double lam = 32.0 * (a0 + 1.0) * std::ldexp(1.0, j);
    x.push_back(1.0 / lam);
    y.push_back(finite(hs, lam) - finite(hk, lam));
  }
  d.truncated = extrapolate(x, y).real();
  d.spread = std::abs(d.truncated -
                      extrapolate(std::vector<double>(x.begin(), x.end() - 1), std::vector<cplx>(y.begin(), y.end() - 1))
                          .real());
  return d;
}

}  // namespace jost
