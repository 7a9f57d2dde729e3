#include "jost/oracle.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace jost {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 4>;  // two complex numbers, real-split

cplx c0(const State& y) { return {y[0], y[1]}; }
cplx c1(const State& y) { return {y[2], y[3]}; }
State pack(cplx a, cplx b) { return {a.real(), a.imag(), b.real(), b.imag()}; }

// e^{z} chi_l(z) = sum_k (l+k)!/(k!(l-k)!) (2z)^{-k}
cplx chi_poly(int l, cplx z) {
  if (l == -1) return 1.0;
  cplx sum = 0, term = 1;
  for (int k = 0; k <= l; ++k) {
    if (k > 0) term *= double((l + k) * (l - k + 1)) / (2.0 * k) / z;
    sum += term;
  }
  return sum;
}
// e^{z} d/dz chi_l(z) = -e^{z} chi_{l-1}(z) - (l/z) e^{z} chi_l(z)
cplx chi_poly_prime(int l, cplx z) {
  if (l == 0) return -chi_poly(0, z);
  return -chi_poly(l - 1, z) - double(l) / z * chi_poly(l, z);
}

double double_factorial(int n) {
  double r = 1;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

// Integrate a linear 2-complex system from r0 through the points of `stops`
// (monotone, all on one side of r0), recording the normalized state at each
// stop.  Normalization factors accumulate in the log scale.
template <class Rhs>
void sweep(Rhs rhs, State y, cplx log_scale, double r0, const std::vector<double>& stops, const OdeConfig& cfg,
           std::vector<State>& out, std::vector<cplx>& scales, double chunk = 0) {
  auto stepper = odeint::make_controlled(cfg.atol, cfg.rtol, odeint::runge_kutta_fehlberg78<State>());
  double r = r0;
  out.clear();
  scales.clear();
  auto normalize = [&] {
    double n = 0;
    for (double v : y) {
      if (!std::isfinite(v)) throw NumericalError("radial integration produced a non-finite state");
      n = std::max(n, std::abs(v));
    }
    if (n > 0) {
      for (double& v : y) v /= n;
      log_scale += std::log(n);
    }
  };
  normalize();  // the absolute tolerance assumes an O(1) state
  for (double s : stops) {
    // exponential growth between normalizations is capped by the chunk length
    while (s != r) {
      const double next = (chunk > 0 && std::abs(s - r) > chunk) ? r + std::copysign(chunk, s - r) : s;
      const double dt = (next - r) / 64.0;
      try {
        odeint::integrate_adaptive(stepper, rhs, y, r, next, dt);
      } catch (const std::exception& ex) {
        throw NumericalError(std::string("radial integration failed: ") + ex.what());
      }
      r = next;
      if (r != s) normalize();
    }
    normalize();
    out.push_back(y);
    scales.push_back(log_scale);
  }
}

std::vector<double> sorted_grid(std::span<const double> grid) {
  std::vector<double> g(grid.begin(), grid.end());
  if (g.empty()) throw std::invalid_argument("radial grid is empty");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw std::invalid_argument("radial grid must be strictly increasing");
  if (!(g.front() > 0)) throw std::invalid_argument("radial grid must be positive");
  return g;
}

std::function<double(double)> potential_of(const SpectralWeight& w) {
  return [w](double r) { return evaluate_potential(w, 3, r); };
}

// Radial span over which exp(|Re sqrt(-k2)| r) grows by at most e^30.
double growth_chunk(cplx k2) {
  const double rate = std::abs(std::sqrt(-k2).real());
  return rate > 0 ? 30.0 / rate : 0.0;
}

RadialSolution schrodinger_sweep(int l, const std::function<double(double)>& V, cplx k2, State seed, cplx log0,
                                 double r0, const std::vector<double>& grid, bool inward, SeedKind kind,
                                 const OdeConfig& cfg) {
  const double ll = double(l) * (l + 1);
  auto rhs = [&](const State& y, State& dy, double r) {
    const cplx f = c0(y), fp = c1(y);
    const cplx fpp = (ll / (r * r) + V(r) - k2) * f;
    dy = pack(fp, fpp);
  };
  std::vector<double> stops = grid;
  if (inward) std::reverse(stops.begin(), stops.end());
  std::vector<State> out;
  std::vector<cplx> sc;
  sweep(rhs, seed, log0, r0, stops, cfg, out, sc, growth_chunk(k2));
  if (inward) {
    std::reverse(out.begin(), out.end());
    std::reverse(sc.begin(), sc.end());
  }
  RadialSolution s;
  s.seed = kind;
  s.components = 1;
  s.r = grid;
  for (std::size_t i = 0; i < out.size(); ++i) {
    s.values.push_back(c0(out[i]));
    s.derivatives.push_back(c1(out[i]));
    s.log_scale.push_back(sc[i]);
  }
  return s;
}

}  // namespace

void OdeConfig::validate() const {
  if (!(r_min > 0) || !(rtol > 0) || !(atol > 0) || !(r_cap > r_min) || r_max < 0 || !(wronskian_tol > 0))
    throw std::invalid_argument("OdeConfig: radii and tolerances must be positive");
  if (r_max > 0 && r_max <= r_min) throw std::invalid_argument("OdeConfig: r_min < r_max required");
}

double OdeConfig::outer_radius(double mu0) const {
  if (r_max > 0) return r_max;
  if (!(mu0 > 0)) return std::min(r_cap, 60.0);
  return std::min(r_cap, 36.0 / mu0);
}

std::vector<double> match_grid(double lo, double hi, int n) {
  if (!(lo > 0) || !(hi > lo) || n < 2) throw std::invalid_argument("match_grid: need 0 < lo < hi, n >= 2");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return g;
}

RadialSolution schrodinger_jost_solution(int l, const SpectralWeight& w, cplx rho, const OdeConfig& cfg,
                                         std::span<const double> grid) {
  cfg.validate();
  if (l < 0) throw std::invalid_argument("orbital label must be nonnegative");
  const auto g = sorted_grid(grid);
  const double R = std::max(cfg.outer_radius(w.empty() ? 0.0 : w.mu0()), g.back());
  const cplx z = rho * R;
  // f = e^{-z} [p(z)], f' = rho e^{-z} [p'(z)]
  const State seed = pack(chi_poly(l, z), rho * chi_poly_prime(l, z));
  return schrodinger_sweep(l, potential_of(w), -rho * rho, seed, -z, R, g, true, SeedKind::Jost, cfg);
}

RadialSolution schrodinger_regular_solution(int l, const SpectralWeight& w, cplx k2, const OdeConfig& cfg,
                                            std::span<const double> grid) {
  cfg.validate();
  if (l < 0) throw std::invalid_argument("orbital label must be nonnegative");
  const auto g = sorted_grid(grid);
  const double r0 = std::min(cfg.r_min, g.front());
  const double c = moments(w, 0) / (2.0 * (l + 1));
  const double nf = double_factorial(2 * l + 1);
  const double rl = std::pow(r0, l);
  const State seed = pack(rl * r0 * (1.0 + c * r0) / nf, (rl * (l + 1) + c * (l + 2) * rl * r0) / nf);
  return schrodinger_sweep(l, potential_of(w), k2, seed, 0.0, r0, g, false, SeedKind::Regular, cfg);
}

RadialSolution schrodinger_irregular_solution(int l, const std::function<double(double)>& potential, cplx k2,
                                              const RadialSolution& partner, const OdeConfig& cfg) {
  cfg.validate();
  if (partner.components != 1 || partner.r.empty()) throw std::invalid_argument("partner must be a scalar solution");
  const std::size_t top = partner.r.size() - 1;
  const cplx p = partner.values[top], dp = partner.derivatives[top];
  const cplx n = p * p + dp * dp;
  // I = dp/n, I' = -p/n in the partner's scale gives W[I, partner] = 1 after
  // dividing the scale out.
  const State seed = pack(dp / n, -p / n);
  return schrodinger_sweep(l, potential, k2, seed, -partner.log_scale[top], partner.r[top], partner.r, true,
                           SeedKind::Irregular, cfg);
}

RadialSolution schrodinger_recessive_solution(int l, const std::function<double(double)>& potential, cplx k2,
                                              const OdeConfig& cfg, std::span<const double> grid) {
  cfg.validate();
  const auto g = sorted_grid(grid);
  const double r0 = std::min(cfg.r_min, g.front());
  const double ll = double(l) * (l + 1);
  auto Q = [&](double r) { return ll / (r * r) + potential(r) - k2; };
  const double h = 1e-4 * r0;
  const cplx q = Q(r0);
  if (!(q.real() > 0)) throw std::invalid_argument("recessive seed needs a repulsive singular potential at r_min");
  const cplx dq = (Q(r0 + h) - Q(r0 - h)) / (2.0 * h);
  const cplx ratio = std::sqrt(q) - dq / (4.0 * q);
  return schrodinger_sweep(l, potential, k2, pack(1.0, ratio), 0.0, r0, g, false, SeedKind::Regular, cfg);
}

cplx jost_wronskian(const RadialSolution& f, const RadialSolution& phi, double tol, double* spread,
                   double* magnitude) {
  if (f.r != phi.r || f.components != 1 || phi.components != 1)
    throw std::invalid_argument("jost_wronskian: solutions must share a scalar grid");
  std::vector<cplx> W(f.r.size());
  // the spread is measured against the size of the two products, so a
  // Wronskian that cancels to near zero (a Jost zero) is not flagged
  double size = 0;
  for (std::size_t i = 0; i < W.size(); ++i) {
    const cplx s = std::exp(f.log_scale[i] + phi.log_scale[i]);
    const cplx a = f.values[i] * phi.derivatives[i] * s, b = f.derivatives[i] * phi.values[i] * s;
    W[i] = a - b;
    size = std::max({size, std::abs(a), std::abs(b)});
  }
  cplx mean = 0;
  for (auto v : W) mean += v;
  mean /= double(W.size());
  double sp = 0;
  for (auto v : W) sp = std::max(sp, std::abs(v - mean) / std::max(std::abs(mean), size));
  if (spread) *spread = sp;
  if (magnitude) *magnitude = std::max(std::abs(mean), size);
  if (!(sp <= tol)) throw NumericalError("Wronskian not constant along the grid (relative spread " + std::to_string(sp) + ")");
  return mean;
}

JostResult oracle_jost_schrodinger(const SpectralWeight& w, int l, const EnergyPoint& e, const OdeConfig& cfg) {
  const double scale = std::max(w.empty() ? 1.0 : w.mu0(), std::abs(e.b));
  const auto grid = match_grid(0.2 / scale, 2.0 / scale, 8);
  const auto f = schrodinger_jost_solution(l, w, e.b, cfg, grid);
  const auto phi = schrodinger_regular_solution(l, w, -e.b * e.b, cfg, grid);
  double spread = 0, magnitude = 0;
  const cplx W = jost_wronskian(f, phi, cfg.wronskian_tol, &spread, &magnitude);
  JostResult r;
  r.value = std::pow(e.b, l) * W;
  r.channel = Channel{3, 2 * l + 1, Sign::plus()};
  r.energy = e;
  r.method = Method::Oracle;
  r.error = spread * magnitude * std::abs(std::pow(e.b, l));
  return r;
}

ContractionSpinor ContractionSpinor::make(const Channel& ch, const EnergyPoint& e) {
  const double xi = ch.xi.real();
  const cplx et = eta(e.zbar, e.b, e.m);
  return {0.5 * (1.0 + xi), 0.5 * (1.0 - xi) / (cplx(0, 1) * et)};
}

RadialSolution dirac_jost_solution(const Channel& ch, InteractionKind kind, const SpectralWeight& w,
                                   const EnergyPoint& e, const OdeConfig& cfg, std::span<const double> grid) {
  cfg.validate();
  if (ch.N != 3) throw std::invalid_argument("Dirac oracle: N = 3 only");
  if (kind != InteractionKind::DiracVector && kind != InteractionKind::DiracScalar)
    throw std::invalid_argument("Dirac oracle: Dirac kind required");
  if (!w.ramps().empty()) throw std::invalid_argument("Dirac oracle: weight must be subtraction-free");
  const auto g = sorted_grid(grid);
  const int L = static_cast<int>(std::lround(ch.L()));
  const int Lx = static_cast<int>(std::lround(ch.L() - ch.xi.real()));
  const double kappa = ch.kappa();
  const double m = e.m;
  const cplx W = e.W();
  const auto V = potential_of(w);
  const bool vector = kind == InteractionKind::DiracVector;
  auto rhs = [&](const State& y, State& dy, double r) {
    const double v = V(r) / (2.0 * m);
    const cplx E = vector ? W - v : W;
    const double M = vector ? m : m + v;
    const cplx G = c0(y), F = c1(y);
    dy = pack(-(kappa / r) * G + (E + M) * F, (kappa / r) * F - (E - M) * G);
  };
  const double R = std::max(cfg.outer_radius(w.empty() ? 0.0 : w.mu0()), g.back());
  const cplx z = e.b * R;
  const cplx et = eta(e.zbar, e.b, m);
  const State seed = pack(chi_poly(L, z), cplx(0, 1) * et * chi_poly(Lx, z));
  std::vector<double> stops(g.rbegin(), g.rend());
  std::vector<State> out;
  std::vector<cplx> sc;
  sweep(rhs, seed, -z, R, stops, cfg, out, sc, growth_chunk(e.b * e.b));
  RadialSolution s;
  s.seed = SeedKind::Jost;
  s.components = 2;
  s.r = g;
  for (std::size_t i = out.size(); i-- > 0;) {
    s.values.push_back(c0(out[i]));
    s.values.push_back(c1(out[i]));
    s.log_scale.push_back(sc[i]);
  }
  return s;
}

cplx dirac_jost_extract(const RadialSolution& sol, const Channel& ch, const EnergyPoint& e, double* spread) {
  constexpr std::size_t window = 4;
  if (sol.components != 2 || sol.r.size() < window + 2)
    throw std::invalid_argument("dirac_jost_extract: need >= 6 radii");
  const ContractionSpinor S = ContractionSpinor::make(ch, e);
  const double ak = std::abs(ch.kappa());
  const double pre = std::sqrt(std::numbers::pi) / std::tgamma(ak + 0.5);
  const std::size_t n = sol.r.size();
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx J = S.s1 * sol.value(i, 0) + S.s2 * sol.value(i, 1);
    v[i] = pre * std::pow(e.b * sol.r[i] / 2.0, ak) * J;
  }
  // Neville extrapolation to r = 0 from `window` consecutive radii
  auto neville = [&](std::size_t first) {
    std::vector<cplx> P(v.begin() + first, v.begin() + first + window);
    const double* r = sol.r.data() + first;
    for (std::size_t k = 1; k < window; ++k)
      for (std::size_t i = 0; i + k < window; ++i) P[i] = (r[i + k] * P[i] - r[i] * P[i + 1]) / (r[i + k] - r[i]);
    return P[0];
  };
  // a finite limit gives the same extrapolation from the inner and the outer
  // window; a power r^{gamma - |kappa|} (Coulomb-like origin) does not
  const cplx inner = neville(0), outer = neville(n - window);
  const double d = std::abs(inner - outer);
  if (spread) *spread = d;
  if (!std::isfinite(d) || d > 1e-6 * std::max(1.0, std::abs(inner)))
    throw NumericalError("dirac_jost_extract: no plateau at small r (window spread " + std::to_string(d) + ")");
  return inner;
}

JostResult oracle_jost_dirac(const Channel& ch, InteractionKind kind, const SpectralWeight& w, const EnergyPoint& e,
                             const OdeConfig& cfg) {
  const double scale = std::max({w.empty() ? 1.0 : w.mu0(), std::abs(e.b), e.m});
  std::vector<double> ladder;
  for (int j = 0; j < 6; ++j) ladder.push_back(std::max(cfg.r_min, 1e-5 / scale) * std::pow(2.0, j));
  const auto sol = dirac_jost_solution(ch, kind, w, e, cfg, ladder);
  double spread = 0;
  JostResult r;
  r.value = dirac_jost_extract(sol, ch, e, &spread);
  r.channel = ch;
  r.energy = e;
  r.method = Method::Oracle;
  r.error = spread;
  return r;
}

JostResult oracle_jost(const Interaction& in, const Channel& ch, const EnergyPoint& e, const OdeConfig& cfg) {
  in.validate();
  if (ch.N != 3) throw std::invalid_argument("oracle: N = 3 only");
  switch (in.kind) {
    case InteractionKind::SchrodingerLocal: {
      JostResult r = oracle_jost_schrodinger(in.sigma, ch.l(), e, cfg);
      r.channel = ch;
      return r;
    }
    case InteractionKind::DiracVector:
    case InteractionKind::DiracScalar:
      return oracle_jost_dirac(ch, in.kind, in.sigma, e, cfg);
    default:
      throw std::invalid_argument("oracle: no direct ODE route for " + to_string(in.kind));
  }
}

std::vector<double> bound_states(const std::function<double(double)>& jost_scan, double lo, double hi, double tol,
                                 int scan_points) {
  if (!(hi > lo) || scan_points < 2) throw std::invalid_argument("bound_states: need lo < hi and >= 2 points");
  std::vector<double> roots;
  double x0 = lo, f0 = jost_scan(lo);
  for (int i = 1; i < scan_points; ++i) {
    const double x1 = lo + (hi - lo) * i / (scan_points - 1);
    const double f1 = jost_scan(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if (f0 * f1 < 0) {
      std::uintmax_t it = 200;
      auto term = [tol](double a, double b) { return std::abs(b - a) <= tol * std::max(1.0, std::abs(a)); };
      const auto br = boost::math::tools::toms748_solve(jost_scan, x0, x1, f0, f1, term, it);
      roots.push_back(0.5 * (br.first + br.second));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

int zero_energy_nodes(const SpectralWeight& w, int l, const OdeConfig& cfg) {
  const double R = cfg.outer_radius(w.empty() ? 0.0 : w.mu0());
  std::vector<double> grid;
  const int n = 4000;
  for (int i = 1; i <= n; ++i) grid.push_back(R * i / n);
  const auto phi = schrodinger_regular_solution(l, w, 0.0, cfg, grid);
  int nodes = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (phi.value(i - 1).real() * phi.value(i).real() < 0) ++nodes;
  return nodes;
}

double variable_phase(const SpectralWeight& w, int l, double k, const OdeConfig& cfg) {
  if (l != 0 && l != 1) throw std::invalid_argument("variable_phase: l in {0, 1}");
  if (!(k > 0)) throw std::invalid_argument("variable_phase: k > 0");
  cfg.validate();
  const auto V = potential_of(w);
  auto jh = [l](double x) { return l == 0 ? std::sin(x) : std::sin(x) / x - std::cos(x); };
  auto nh = [l](double x) { return l == 0 ? -std::cos(x) : -std::cos(x) / x - std::sin(x); };
  using S1 = std::array<double, 1>;
  auto rhs = [&](const S1& y, S1& dy, double r) {
    const double x = k * r;
    const double t = jh(x) * std::cos(y[0]) - nh(x) * std::sin(y[0]);
    dy[0] = -V(r) * t * t / k;
  };
  S1 y{0.0};
  const double R = cfg.outer_radius(w.empty() ? 0.0 : w.mu0());
  auto stepper = odeint::make_controlled(cfg.atol, cfg.rtol, odeint::runge_kutta_fehlberg78<S1>());
  odeint::integrate_adaptive(stepper, rhs, y, cfg.r_min, R, 1e-3);
  return y[0];
}

}  // namespace jost
