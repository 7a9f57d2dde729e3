#include "jost/engine.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <set>

namespace jost {

namespace {
constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

bool is_int(double x) { return std::abs(x - std::round(x)) < 1e-12; }

// P^a_j(T)/(T^2-1)^{a/2}-type weight for two degrees at once.  For a = 0 the
// Legendre recurrence is shared.
void weight_pair(double j1, double j2, double a, cplx T, cplx& w1, cplx& w2) {
  if (a == 0.0 && is_int(j1) && is_int(j2) && j1 >= 0 && j2 >= 0) {
    const int l1 = static_cast<int>(std::lround(j1)), l2 = static_cast<int>(std::lround(j2));
    const int lmax = std::max(l1, l2);
    cplx p0(1.0), p1 = T;
    w1 = (l1 == 0) ? p0 : cplx(0);
    w2 = (l2 == 0) ? p0 : cplx(0);
    if (l1 == 1) w1 = p1;
    if (l2 == 1) w2 = p1;
    for (int n = 1; n < lmax; ++n) {
      const cplx p2 = ((2.0 * n + 1.0) * T * p1 - double(n) * p0) / double(n + 1);
      p0 = p1;
      p1 = p2;
      if (n + 1 == l1) w1 = p2;
      if (n + 1 == l2) w2 = p2;
    }
    return;
  }
  w1 = kernel_weight_p(j1, a, T);
  w2 = (j2 == j1) ? w1 : kernel_weight_p(j2, a, T);
}

double kernel_prefactor(int N) {
  const double a = 0.5 * (3 - N);
  return 4.0 * pi / (sphere_area(N) * std::pow(pi, a));
}

// int_{lo}^{D} dnu Sigma_smooth(nu) W_j(T(u alpha | nu)) for two degrees.
void smooth_pair(const SpectralWeight& w, int N, double j1, double j2, cplx u, cplx al, double D, cplx& k1,
                 cplx& k2) {
  k1 = k2 = 0.0;
  const auto knots = w.smooth_knots();
  if (knots.empty()) return;
  double top = D;
  if (w.ramps().empty() && !w.continuum().empty()) top = std::min(top, w.continuum().back().nu);
  const double lo = knots.front();
  if (!(top > lo)) return;
  std::vector<double> cuts{lo};
  for (double k : knots)
    if (k > lo && k < top) cuts.push_back(k);
  cuts.push_back(top);
  const double a = 0.5 * (3 - N);
  const cplx two_ua = 2.0 * u * al;
  const cplx scale = (a == 0.0) ? cplx(1.0) : std::pow(two_ua, -a);
  const cplx s2 = u * u + al * al;
  const int order = (a == 0.0) ? static_cast<int>(std::max(j1, j2)) + 3 : 20;
  const GaussRule& g = GaussRule::get(order);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double x0 = cuts[k], x1 = cuts[k + 1];
    const bool endpoint = (a != 0.0) && (k + 2 == cuts.size()) && top == D;
    for (int q = 0; q < order; ++q) {
      double nu, wt;
      if (endpoint) {
        // nu = x1 - (x1 - x0) y^2 removes the square-root endpoint behaviour
        const double y = 0.5 * (1.0 + g.x[q]);
        nu = x1 - (x1 - x0) * y * y;
        wt = 0.5 * g.w[q] * 2.0 * (x1 - x0) * y;
      } else {
        nu = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * g.x[q];
        wt = 0.5 * (x1 - x0) * g.w[q];
      }
      const double s = w.smooth_density(nu);
      if (s == 0.0) continue;
      const cplx T = (s2 - nu * nu) / two_ua;
      cplx w1, w2;
      weight_pair(j1, j2, a, T, w1, w2);
      k1 += wt * s * w1;
      k2 += wt * s * w2;
    }
  }
  k1 *= scale;
  k2 *= scale;
}

void line_pair(double g, double mu, int N, double j1, double j2, cplx u, cplx al, cplx& k1, cplx& k2) {
  const double a = 0.5 * (3 - N);
  const cplx two_ua = 2.0 * u * al;
  const cplx T = (u * u + al * al - mu * mu) / two_ua;
  weight_pair(j1, j2, a, T, k1, k2);
  const cplx scale = (a == 0.0) ? cplx(g) : g * std::pow(two_ua, -a);
  k1 *= scale;
  k2 *= scale;
}

// Scalar kernel pair of a whole weight at real (u, rho).
void scalar_pair(const SpectralWeight& w, int N, double j1, double j2, double u, double rho, cplx& k1, cplx& k2) {
  k1 = k2 = 0.0;
  const double D = u - rho;
  for (auto& l : w.lines()) {
    if (D < l.mu) continue;
    cplx a1, a2;
    line_pair(l.g, l.mu, N, j1, j2, u, rho, a1, a2);
    k1 += a1;
    k2 += a2;
  }
  cplx s1, s2;
  smooth_pair(w, N, j1, j2, u, rho, D, s1, s2);
  const double pref = kernel_prefactor(N);
  k1 = pref * (k1 + s1);
  k2 = pref * (k2 + s2);
}

cplx ipow(cplx z, double L) {
  if (is_int(L) && L >= 0) {
    cplx r(1.0);
    for (long n = std::lround(L); n > 0; --n) r *= z;
    return r;
  }
  return std::pow(z, L);
}

}  // namespace

// ------------------------------------------------------------------ kernels

double kernel_schrodinger(const SpectralWeight& w, double j, int N, double u, double rho) {
  if (!(u > 0) || !(rho > 0)) throw DomainError("kernel_schrodinger: momenta must be positive");
  if (u <= rho) return 0.0;
  cplx k1, k2;
  scalar_pair(w, N, j, j, u, rho, k1, k2);
  return k1.real();
}

cplx kernel_dirac(const SpectralWeight& w, const Channel& ch, InteractionKind kind, double m, Sign zp, Sign z,
                  double u, double rho) {
  if (kind != InteractionKind::DiracVector && kind != InteractionKind::DiracScalar)
    throw std::invalid_argument("kernel_dirac: Dirac kind required");
  if (!w.ramps().empty()) throw std::invalid_argument("kernel_dirac: weight must be subtraction-free");
  if (u <= rho) return 0.0;
  cplx kL, kLp;
  scalar_pair(w, ch.N, ch.L(), ch.L_partner(), u, rho, kL, kLp);
  const double sg = kind == InteractionKind::DiracScalar ? -1.0 : 1.0;
  return (I * u / (2.0 * m)) * (kL / eta(zp, u, m) + sg * eta(z, rho, m) * kLp);
}

double kernel_relcorr(const SpectralWeight& w, const Channel& ch, double m, double u, double rho) {
  if (ch.N != 3) throw std::invalid_argument("kernel_relcorr: N = 3 only");
  if (u <= rho) return 0.0;
  cplx k1, k2;
  scalar_pair(w, 3, ch.l(), ch.l_partner(), u, rho, k1, k2);
  const double c = 1.0 / (4.0 * m * m);
  const double A1 = 1.0 + 0.5 * c * (u * u + rho * rho);
  const double A2 = -c * u * rho;
  return (A1 * k1 + A2 * k2).real();
}

// ------------------------------------------------------------------ config

void SolverConfig::validate() const {
  if (order < 2 || error_order < 2) throw std::invalid_argument("solver order must be at least 2");
  if (!(width > 0) || !(ratio > 1.0) || !(geometric_from > 0) || !(s_max > 0) || !(guard >= 0))
    throw std::invalid_argument("solver grid parameters must be positive (ratio > 1)");
}

// ------------------------------------------------------------------ channel kernel

void ChannelKernel::add_weight(const SpectralWeight& w, int which) {
  for (auto& l : w.lines()) comps_.push_back({true, which, l.g, l.mu, l.mu});
  const auto knots = w.smooth_knots();
  if (!knots.empty()) comps_.push_back({false, which, 0.0, 0.0, knots.front()});
}

ChannelKernel ChannelKernel::schrodinger(const SpectralWeight& w, int N, int l) {
  if (N < 2) throw InvalidChannel("dimension must be at least 2");
  if (l < 0) throw InvalidChannel("orbital label must be nonnegative");
  ChannelKernel k;
  k.kind_ = InteractionKind::SchrodingerLocal;
  k.N_ = N;
  k.ch_ = Channel{N, 1, Sign::plus()};
  const double a = 0.5 * (3 - N);
  k.j1_ = k.j2_ = l - a;
  k.exponent_ = l - a;
  k.w_[0] = w;
  k.add_weight(w, 0);
  k.mu0_ = std::numeric_limits<double>::infinity();
  for (auto& c : k.comps_) k.mu0_ = std::min(k.mu0_, c.delay);
  if (k.comps_.empty()) k.mu0_ = 1.0;
  return k;
}

ChannelKernel ChannelKernel::make(const Interaction& in, const Channel& ch) {
  in.validate();
  ChannelKernel k;
  switch (in.kind) {
    case InteractionKind::SchrodingerLocal:
      return schrodinger(in.sigma, ch.N, ch.l());
    case InteractionKind::DiracVector:
    case InteractionKind::DiracScalar:
      k.dirac_ = true;
      k.j1_ = ch.L();
      k.j2_ = ch.L_partner();
      k.exponent_ = ch.L();
      k.sigma_sign_ = in.kind == InteractionKind::DiracScalar ? -1.0 : 1.0;
      break;
    case InteractionKind::SchrodingerRelCorr:
      if (ch.N != 3) throw InvalidChannel("relativistic-correction kind needs N = 3");
      k.j1_ = ch.l();
      k.j2_ = ch.l_partner();
      k.exponent_ = ch.l();
      break;
    case InteractionKind::SchrodingerNonlocal:
      if (ch.N != 3) throw InvalidChannel("nonlocal kind needs N = 3");
      k.j1_ = k.j2_ = ch.l();
      k.exponent_ = ch.l();
      break;
  }
  k.kind_ = in.kind;
  k.ch_ = ch;
  k.N_ = ch.N;
  k.m_ = in.mass;
  k.w_[0] = in.sigma;
  k.w_[1] = in.sigma2;
  k.add_weight(in.sigma, 0);
  if (in.kind == InteractionKind::SchrodingerNonlocal) k.add_weight(in.sigma2, 1);
  k.mu0_ = std::numeric_limits<double>::infinity();
  for (auto& c : k.comps_) k.mu0_ = std::min(k.mu0_, c.delay);
  if (k.comps_.empty()) k.mu0_ = 1.0;
  return k;
}

ChannelKernel ChannelKernel::perturbed(double eps) const {
  ChannelKernel k = *this;
  k.fault_ = eps;
  return k;
}

void ChannelKernel::base(const Component& c, cplx u, cplx alpha, cplx& k1, cplx& k2) const {
  const double D = (u - alpha).real();
  if (D < c.delay - 1e-12) {
    k1 = k2 = 0.0;
    return;
  }
  if (c.line) {
    line_pair(c.g, c.mu, N_, j1_, j2_, u, alpha, k1, k2);
  } else {
    smooth_pair(w_[c.weight], N_, j1_, j2_, u, alpha, D, k1, k2);
  }
  const double pref = kernel_prefactor(N_);
  k1 *= pref;
  k2 *= pref;
}

void ChannelKernel::block(std::size_t ci, cplx u, cplx alpha, std::span<cplx> out) const {
  const Component& c = comps_[ci];
  cplx k1, k2;
  base(c, u, alpha, k1, k2);
  const double fscale = 1.0 + fault_ * u.real();
  if (!dirac_) {
    cplx v;
    switch (kind_) {
      case InteractionKind::SchrodingerRelCorr: {
        const double cc = 1.0 / (4.0 * m_ * m_);
        v = (1.0 + 0.5 * cc * (u * u + alpha * alpha)) * k1 - cc * u * alpha * k2;
        break;
      }
      case InteractionKind::SchrodingerNonlocal:
        v = c.weight == 0 ? k1 : -(u * u + alpha * alpha) / (4.0 * m_ * m_) * k1;
        break;
      default:
        v = k1;
    }
    out[0] = v * fscale;
    return;
  }
  const cplx pre = I * u / (2.0 * m_);
  cplx eu[2], ea[2];
  for (int i = 0; i < 2; ++i) {
    eu[i] = eta(sheet_of(i), u, m_);
    ea[i] = eta(sheet_of(i), alpha, m_);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx v = pre * (k1 / eu[i] + sigma_sign_ * ea[j] * k2);
      if (i != j) v *= fscale;
      out[i * 2 + j] = v;
    }
}

void ChannelKernel::full_block(cplx u, cplx alpha, std::span<cplx> out) const {
  const int n = dim() * dim();
  std::vector<cplx> tmp(n);
  std::fill(out.begin(), out.begin() + n, cplx(0));
  for (std::size_t c = 0; c < comps_.size(); ++c) {
    block(c, u, alpha, tmp);
    for (int i = 0; i < n; ++i) out[i] += tmp[i];
  }
}

void ChannelKernel::propagator(cplx alpha, const EnergyPoint& e, std::span<cplx> out) const {
  if (!dirac_) {
    out[0] = 1.0 / (alpha * alpha - e.b * e.b);
    return;
  }
  for (int i = 0; i < 2; ++i) out[i] = sheet_propagator(sheet_of(i), alpha, e);
}

void ChannelKernel::norm(cplx u, const EnergyPoint& e, std::span<cplx> out) const {
  if (!dirac_) {
    out[0] = 1.0;
    return;
  }
  for (int i = 0; i < 2; ++i) out[i] = sheet_norm(sheet_of(i), ch_.xi, u, e);
}

std::vector<double> ChannelKernel::breakpoints(double limit, int max_count) const {
  std::set<double> base;
  for (auto& c : comps_) base.insert(c.delay);
  for (int k = 0; k < 2; ++k)
    for (double x : w_[k].smooth_knots())
      if (x > 0) base.insert(x);
  std::vector<double> gens(base.begin(), base.end());
  std::vector<double> out;
  std::vector<double> frontier{0.0};
  // sums of generators up to limit, breadth first
  std::set<double> seen;
  while (!frontier.empty() && static_cast<int>(out.size()) < max_count) {
    std::vector<double> next;
    for (double f : frontier)
      for (double g : gens) {
        const double v = f + g;
        if (v > limit + 1e-12) continue;
        const double key = std::round(v * 1e10) / 1e10;
        if (seen.insert(key).second) {
          out.push_back(v);
          next.push_back(v);
          if (static_cast<int>(out.size()) >= max_count) break;
        }
      }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ------------------------------------------------------------------ Jost

std::string to_string(Method m) { return m == Method::Volterra ? "volterra" : "oracle"; }

namespace {

// int (rho/u)^L sum_j G_j N_j a_j along the ray, plus the 1/u^2 tail.
cplx ray_integral(const ChannelKernel& K, const EnergyPoint& e, const RaySolution& ray, double* tail_out) {
  const int D = K.dim();
  std::vector<cplx> G(D), Nn(D), av(D);
  const double L = K.exponent();
  auto f = [&](double s, std::span<const cplx> a) {
    const cplx u = ray.point(s);
    K.propagator(u, e, G);
    K.norm(u, e, Nn);
    cplx acc = 0;
    for (int j = 0; j < D; ++j) acc += G[j] * Nn[j] * a[j];
    return ipow(ray.start / u, L) * acc;
  };
  cplx sum = 0;
  for (std::size_t p = 0; p < ray.panels.size(); ++p)
    for (int q = 0; q < ray.order; ++q) {
      for (int j = 0; j < D; ++j) av[j] = ray.at(p, q, j);
      sum += ray.panels[p].w[q] * f(ray.panels[p].x[q], av);
    }
  cplx tail = 0;
  if (!ray.panels.empty()) {
    const double S = ray.end();
    ray.eval(S, av);
    tail = f(S, av) * ray.point(S);
  }
  if (tail_out) *tail_out = std::abs(tail);
  return sum + tail;
}

}  // namespace

cplx osjf(const ChannelKernel& K, const EnergyPoint& e, cplx rho, Sign zeta, const SolverConfig& cfg,
          double* tail_out) {
  const int fixed = K.is_dirac() ? sheet_index(zeta) : 0;
  const RaySolution ray = solve_ray(K, e, rho, fixed, Direction::Up, cfg);
  std::vector<cplx> Nn(K.dim());
  K.norm(rho, e, Nn);
  return Nn[fixed] + ray_integral(K, e, ray, tail_out);
}

JostResult jost_function(const ChannelKernel& K, const EnergyPoint& e, const SolverConfig& cfg) {
  JostResult r;
  r.channel = K.channel();
  r.energy = e;
  r.method = Method::Volterra;
  double tail = 0;
  r.value = osjf(K, e, e.b, e.zbar, cfg, &tail);
  r.tail = tail;
  if (cfg.estimate_error) {
    SolverConfig c2 = cfg;
    c2.order = cfg.error_order;
    const cplx v2 = osjf(K, e, e.b, e.zbar, c2);
    r.error = std::abs(r.value - v2) + 1e-2 * tail;
  } else {
    r.error = 1e-2 * tail;
  }
  return r;
}

double phase_shift(cplx F_plus, cplx F_minus, bool* near_pole) {
  if (near_pole) *near_pole = std::abs(F_minus) < 1e-10;
  if (std::abs(F_minus) == 0.0) throw DomainError("phase_shift: F_minus vanishes");
  const cplx r = std::log(F_plus / F_minus) / cplx(0.0, 2.0);
  double d = r.real();
  // reduce to (-pi, pi]
  d = std::remainder(d, 2.0 * pi);
  if (d <= -pi) d += 2.0 * pi;
  return d;
}

DeterminantResult determinant_product(std::span<const JostResult> F, int N, double J_max) {
  DeterminantResult out;
  if (F.empty()) return out;
  const EnergyPoint& e0 = F.front().energy;
  double top = -1;
  for (auto& f : F) {
    if (f.energy.b != e0.b || !(f.energy.zbar == e0.zbar))
      throw std::invalid_argument("determinant_product: inconsistent energy points");
    if (f.channel.N != N) throw std::invalid_argument("determinant_product: channel dimension mismatch");
    if (f.channel.J() <= J_max + 1e-12) top = std::max(top, f.channel.J());
  }
  for (auto& f : F) {
    if (f.channel.J() > J_max + 1e-12) continue;
    const std::uint64_t deg = f.channel.degeneracy();
    cplx p(1.0), base = f.value;
    for (std::uint64_t d = deg; d > 0; d >>= 1) {
      if (d & 1) p *= base;
      base *= base;
    }
    out.value *= p;
    if (std::abs(f.channel.J() - top) < 1e-12) out.increment += std::abs(f.value - 1.0) * double(deg);
  }
  return out;
}

// ------------------------------------------------------------------ dispersion

namespace {
std::vector<double> log_grid(const DispersionConfig& c) {
  if (!(c.eps_min > 0) || !(c.eps_max > c.eps_min) || c.points < 8)
    throw std::invalid_argument("dispersion grid: need 0 < eps_min < eps_max and >= 8 points");
  int n = c.points;
  if (n % 2 == 0) ++n;  // Simpson needs an odd count
  std::vector<double> e(n);
  const double t0 = std::log(c.eps_min), t1 = std::log(c.eps_max);
  for (int i = 0; i < n; ++i) e[i] = std::exp(t0 + (t1 - t0) * i / (n - 1));
  return e;
}
}  // namespace

DispersionResult dispersion_check(const std::function<double(double)>& phase_of_eps, std::span<const double> bound_b,
                                  cplx b_eval, cplx F_eval, const DispersionConfig& cfg) {
  const auto eps = log_grid(cfg);
  const int n = static_cast<int>(eps.size());
  const double h = std::log(eps[1] / eps[0]);
  const cplx W = -b_eval * b_eval;
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = phase_of_eps(eps[i]);
  // resolution guard: neighbouring phases must not jump by more than 0.5 rad
  for (int i = 1; i < n; ++i)
    if (std::abs(d[i] - d[i - 1]) > 0.5)
      throw GridError("dispersion_check: phase grid too coarse (jump of " + std::to_string(d[i] - d[i - 1]) + ")");
  cplx integral = 0;
  for (int i = 0; i < n; ++i) {
    const double c = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += c * d[i] * eps[i] / (eps[i] - W);
  }
  integral *= h / 3.0;
  // below eps_min: delta treated as constant
  integral += d.front() * std::log((eps.front() - W) / (-W));
  // above eps_max: delta ~ A ln(1 + 4k^2/mu^2)/k
  {
    const double kmax = std::sqrt(eps.back());
    const double mu = cfg.tail_mu;
    const double A = d.back() * kmax / std::log(1.0 + 4.0 * kmax * kmax / (mu * mu));
    struct P {
      double mu;
      cplx W;
      bool imag;
    };
    auto fn = [](double k, void* v) {
      auto* p = static_cast<P*>(v);
      const cplx val = 2.0 * std::log(1.0 + 4.0 * k * k / (p->mu * p->mu)) / (k * k - p->W);
      return p->imag ? val.imag() : val.real();
    };
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(200);
    double re = 0, im = 0, err = 0;
    P pr{mu, W, false}, pi_{mu, W, true};
    gsl_function f1{fn, &pr}, f2{fn, &pi_};
    gsl_integration_qagiu(&f1, kmax, 0.0, 1e-10, 200, ws, &re, &err);
    if (W.imag() != 0.0) gsl_integration_qagiu(&f2, kmax, 0.0, 1e-10, 200, ws, &im, &err);
    gsl_integration_workspace_free(ws);
    gsl_set_error_handler(old);
    integral += A * cplx(re, im);
  }
  cplx prod(1.0);
  for (double bn : bound_b) prod *= 1.0 - (-bn * bn) / W;
  DispersionResult r;
  r.rhs = prod * std::exp(-integral / pi);
  r.mismatch = std::abs(F_eval - r.rhs) / std::abs(F_eval);
  return r;
}

std::vector<std::pair<double, double>> phase_table(const ChannelKernel& K, const SolverConfig& cfg,
                                                   const DispersionConfig& dcfg) {
  const auto eps = log_grid(dcfg);
  SolverConfig c = cfg;
  c.estimate_error = false;
  std::vector<std::pair<double, double>> out(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double k = std::sqrt(eps[i]);
    const JostResult F = jost_function(K, EnergyPoint::from_k(k), c);
    out[i] = {eps[i], -std::arg(F.value)};
  }
  // unwrap downward from the high-energy end
  for (std::size_t i = out.size() - 1; i-- > 0;) {
    double d = out[i].second;
    const double ref = out[i + 1].second;
    d += 2.0 * pi * std::round((ref - d) / (2.0 * pi));
    out[i].second = d;
  }
  return out;
}

std::pair<JostResult, JostResult> cpt_check(const SpectralWeight& w, InteractionKind kind, const Channel& ch,
                                            const EnergyPoint& e, const SolverConfig& cfg) {
  if (kind != InteractionKind::DiracVector && kind != InteractionKind::DiracScalar)
    throw std::invalid_argument("cpt_check: Dirac kind required");
  Interaction a{kind, e.m, w, {}};
  Interaction b{kind, e.m, kind == InteractionKind::DiracVector ? w.scaled(-1.0) : w, {}};
  const Channel mirrored{ch.N, ch.twoJ, -ch.xi};
  const EnergyPoint e2{e.b, -e.zbar, e.m};
  return {jost_function(ChannelKernel::make(a, ch), e, cfg), jost_function(ChannelKernel::make(b, mirrored), e2, cfg)};
}

KernelTable kernel_table(const ChannelKernel& K, double rho, std::span<const double> u_grid) {
  KernelTable t;
  t.u.assign(u_grid.begin(), u_grid.end());
  t.rho = rho;
  t.dim = K.dim();
  const int n = t.dim * t.dim;
  t.values.resize(t.u.size() * n);
  for (std::size_t k = 0; k < t.u.size(); ++k)
    K.full_block(t.u[k], rho, std::span<cplx>(t.values.data() + k * n, n));
  return t;
}

}  // namespace jost
