#include "jost/density.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jost {

namespace {

const cplx I(0.0, 1.0);

struct Node {
  double x, w;
};

// Gauss nodes on [lo, hi] split at the sorted cut points.
void segment_nodes(double lo, double hi, const std::vector<double>& cuts, int order, std::vector<Node>& out) {
  if (!(hi > lo)) return;
  const GaussRule& gr = GaussRule::get(order);
  double a = lo;
  auto emit = [&](double x0, double x1) {
    if (x1 - x0 <= 1e-14 * std::max(1.0, x1)) return;
    const double h = 0.5 * (x1 - x0);
    for (int i = 0; i < order; ++i) out.push_back({x0 + h * (1.0 + gr.x[i]), h * gr.w[i]});
  };
  for (double c : cuts) {
    if (c <= a) continue;
    if (c >= hi) break;
    emit(a, c);
    a = c;
  }
  emit(a, hi);
}

double smooth_top(const SpectralWeight& w) {
  const auto knots = w.smooth_knots();
  if (!w.ramps().empty()) return std::numeric_limits<double>::infinity();
  return knots.empty() ? 0.0 : knots.back();
}

double smooth_bottom(const SpectralWeight& w) {
  const auto knots = w.smooth_knots();
  return knots.empty() ? std::numeric_limits<double>::infinity() : knots.front();
}

std::size_t panel_of(const std::vector<Panel>& ps, double x) {
  auto it = std::upper_bound(ps.begin(), ps.end(), x, [](double v, const Panel& p) { return v < p.lo; });
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - ps.begin()) - 1));
}

bool is_supported(InteractionKind k) {
  return k == InteractionKind::SchrodingerLocal || k == InteractionKind::DiracVector ||
         k == InteractionKind::DiracScalar;
}

bool dirac(InteractionKind k) { return k == InteractionKind::DiracVector || k == InteractionKind::DiracScalar; }

// Propagator measure of the alpha integral on sheet zp.
cplx measure(InteractionKind kind, Sign zp, cplx alpha, const EnergyPoint& e, double m) {
  if (dirac(kind)) return I * alpha * sheet_propagator(zp, alpha, e) / (2.0 * m);
  return 1.0 / (alpha * alpha - e.b * e.b);
}

}  // namespace

BornCoefficients born_coefficients(InteractionKind kind, double m, Sign zx, Sign zy, cplx x, cplx y) {
  switch (kind) {
    case InteractionKind::DiracVector:
      return {1.0 / eta(zx, x, m), eta(zy, y, m)};
    case InteractionKind::DiracScalar:
      return {1.0 / eta(zx, x, m), -eta(zy, y, m)};
    case InteractionKind::SchrodingerRelCorr:
      return {1.0 + (x * x + y * y) / (8.0 * m * m), -x * y / (4.0 * m * m)};
    case InteractionKind::SchrodingerLocal:
      return {1.0, 0.0};
    case InteractionKind::SchrodingerNonlocal:
      break;
  }
  throw std::invalid_argument("born_coefficients: no two-term Born form for the nonlocal kind");
}

BornCoefficients physical_relcorr_coefficients(double m, cplx q, cplx p) {
  return {1.0 - (q * q + p * p) / (8.0 * m * m), q * p / (4.0 * m * m)};
}

void DensityGrid::validate() const {
  if (!(span > 0)) throw std::invalid_argument("density grid: span must be positive");
  if (nu_order < 2 || tau_order < 2 || mu_order < 2 || theta_nodes < 2 || tau_panels < 1)
    throw std::invalid_argument("density grid: orders must be at least 2");
  if (!(nu_width > 0 && nu_width <= 1.0))
    throw std::invalid_argument("density grid: nu_width must lie in (0, 1] (explicit march)");
  if (max_order < 0 || max_order > 2)
    throw std::invalid_argument("density grid: max_order must be 0 (all), 1 or 2");
}

void DensityTable::remainder(double nu, double s, std::span<cplx> out) const {
  const int C = components();
  std::fill(out.begin(), out.begin() + C, cplx(0));
  if (nu_panels.empty() || nu < nu_start() || nu > grid.span) return;
  const std::size_t pn = panel_of(nu_panels, nu);
  const double tau = std::clamp((s - nu) / std::max(grid.span - nu, 1e-300), 0.0, 1.0);
  const std::size_t pt = panel_of(tau_panels, tau);
  std::vector<double> bn(grid.nu_order), bt(grid.tau_order);
  lagrange_basis(nu_panels[pn], std::min(nu, nu_panels[pn].hi), bn);
  lagrange_basis(tau_panels[pt], std::min(tau, tau_panels[pt].hi), bt);
  const std::size_t nt = n_tau();
  for (int a = 0; a < grid.nu_order; ++a) {
    if (bn[a] == 0.0) continue;
    const std::size_t in = pn * grid.nu_order + a;
    for (int c = 0; c < grid.tau_order; ++c) {
      const double wgt = bn[a] * bt[c];
      if (wgt == 0.0) continue;
      const std::size_t base = (in * nt + pt * grid.tau_order + c) * C;
      for (int k = 0; k < C; ++k) out[k] += wgt * values[base + k];
    }
  }
}

void DensityTable::smooth(double nu, double s, std::span<cplx> out) const {
  remainder(nu, s, out);
  const double sig = weight.smooth_density(nu);
  if (sig == 0.0) return;
  const cplx x = point(s);
  for (int zs = 0; zs < sheets; ++zs) {
    const BornCoefficients M = born_coefficients(kind, mass, sheet_of(zs), zeta, x, rho);
    out[zs * parts] += sig * M.m1;
    if (parts > 1) out[zs * parts + 1] += sig * M.m2;
  }
}

DensityTable solve_density(const Interaction& in, double rho, const EnergyPoint& e, Sign zeta,
                           const DensityGrid& grid) {
  grid.validate();
  if (!is_supported(in.kind))
    throw std::invalid_argument("solve_density: only local Schroedinger and Dirac interactions have a density");
  const SpectralWeight& w = in.sigma;
  const double mu0 = w.mu0();
  if (!(mu0 > 0)) throw GridError("solve_density: spectral threshold must be positive");
  if (!w.ramps().empty()) throw std::invalid_argument("solve_density: unbounded ramps are not supported");

  DensityTable D;
  D.rho = rho;
  D.energy = e;
  D.zeta = zeta;
  D.kind = in.kind;
  D.mass = in.mass;
  D.weight = w;
  D.grid = grid;
  D.sheets = dirac(in.kind) ? 2 : 1;
  D.parts = dirac(in.kind) ? 2 : 1;
  const double m = in.mass;
  const double S = grid.span;

  // intermediate momenta alpha run over [rho + mu0, rho + span]
  const double a0 = rho + mu0, a1 = rho + S;
  auto crosses = [&](double p) { return (a0 - p) * (a1 - p) <= 0.0; };
  if (dirac(in.kind) && (crosses(m) || crosses(-m)))
    throw GridError("solve_density: the path crosses the branch point |alpha| = m");
  if (a0 * a1 <= 0.0) throw GridError("solve_density: the path crosses alpha = 0");
  if (e.b.imag() == 0.0 && (crosses(e.b.real()) || crosses(-e.b.real())))
    throw GridError("solve_density: the path crosses the propagator pole alpha = b");
  const double sgn = rho > 0 || (rho == 0 && a1 > 0) ? 1.0 : -1.0;

  const std::vector<double> cuts = ChannelKernel::schrodinger(w, 3, 0).breakpoints(S + mu0, 4000);

  // nu panels from the second-order threshold
  const double nu0 = 2.0 * mu0;
  if (nu0 < S && grid.max_order != 1) {
    PanelGridSpec spec;
    spec.origin = nu0;
    spec.breaks = cuts;
    spec.max_width = grid.nu_width * mu0;
    spec.geometric_from = S + 1.0;
    spec.end = S;
    spec.order = grid.nu_order;
    D.nu_panels = build_panels(spec);
  }
  for (int k = 0; k < grid.tau_panels; ++k)
    D.tau_panels.push_back(make_panel(static_cast<double>(k) / grid.tau_panels,
                                      static_cast<double>(k + 1) / grid.tau_panels, grid.tau_order));
  const int C = D.components();
  const std::size_t NT = D.n_tau();
  D.values.assign(D.n_nu() * NT * C, 0.0);
  if (D.nu_panels.empty()) return D;

  const double wtop = smooth_top(w), wbot = smooth_bottom(w);
  const auto theta = chebyshev_nodes(grid.theta_nodes);
  const double inv_theta = 1.0 / grid.theta_nodes;
  const bool use_remainder = grid.max_order == 0;

  std::vector<Node> gnodes, mnodes;
  std::vector<cplx> rem(C), acc(C);
  std::vector<double> bn(grid.nu_order), bt(grid.tau_order);

  for (std::size_t pn = 0; pn < D.nu_panels.size(); ++pn)
    for (int a = 0; a < grid.nu_order; ++a) {
      const double nu = D.nu_panels[pn].x[a];
      const std::size_t inu = pn * grid.nu_order + a;
      // gamma nodes: lines and the smooth part, gamma in [mu0, nu - mu0]
      gnodes.clear();
      for (auto& l : w.lines())
        if (l.mu <= nu - mu0 + 1e-14) gnodes.push_back({l.mu, l.g});
      {
        const std::size_t first = gnodes.size();
        segment_nodes(std::max(mu0, wbot), std::min(nu - mu0, wtop), cuts, grid.mu_order, gnodes);
        for (std::size_t i = first; i < gnodes.size(); ++i) gnodes[i].w *= w.smooth_density(gnodes[i].x);
      }
      for (std::size_t pt = 0; pt < D.tau_panels.size(); ++pt)
        for (int c = 0; c < grid.tau_order; ++c) {
          const double s = nu + D.tau_panels[pt].x[c] * (S - nu);
          const double x = rho + s;
          const double T = cosine(x, rho, nu);
          std::fill(acc.begin(), acc.end(), cplx(0));
          for (const Node& gn : gnodes) {
            const double gamma = gn.x;
            const double mu_max = nu - gamma;
            // mu nodes: Born lines, then smooth nodes carrying Born and remainder
            mnodes.clear();
            for (auto& l : w.lines())
              if (l.mu <= mu_max + 1e-14) mnodes.push_back({l.mu, l.g});
            const std::size_t n_lines = mnodes.size();
            const double smooth_lo = use_remainder ? mu0 : std::max(mu0, wbot);
            const double smooth_hi = use_remainder && mu_max >= nu0 ? mu_max : std::min(mu_max, wtop);
            segment_nodes(smooth_lo, smooth_hi, cuts, grid.mu_order, mnodes);
            for (std::size_t im = 0; im < mnodes.size(); ++im) {
              const double mu = mnodes[im].x;
              const bool line = im < n_lines;
              const double born_w = line ? mnodes[im].w : mnodes[im].w * w.smooth_density(mu);
              const bool with_rem = !line && use_remainder && mu >= nu0;
              if (born_w == 0.0 && !with_rem) continue;
              const LambdaBounds lb = lambda_bounds(nu, mu, gamma, x, rho);
              std::size_t pm = 0;
              if (with_rem) {
                pm = panel_of(D.nu_panels, mu);
                lagrange_basis(D.nu_panels[pm], std::min(mu, D.nu_panels[pm].hi), bn);
              }
              for (double ct : theta) {
                const double A = lb.mid() + lb.half() * ct;
                if (!(A > 0)) throw GridError("solve_density: alpha^2 left the positive axis");
                const double alpha = sgn * std::sqrt(A);
                const double X = cosine(x, alpha, gamma), Y = cosine(alpha, rho, mu);
                const double den = T * T - 1.0;
                const double c1 = (T * Y - X) / den, c2 = (T * X - Y) / den;
                if (with_rem) {
                  std::fill(rem.begin(), rem.end(), cplx(0));
                  const double sa = alpha - rho;
                  const double tau = std::clamp((sa - mu) / (S - mu), 0.0, 1.0);
                  const std::size_t pt2 = panel_of(D.tau_panels, tau);
                  lagrange_basis(D.tau_panels[pt2], std::min(tau, D.tau_panels[pt2].hi), bt);
                  for (int i = 0; i < grid.nu_order; ++i) {
                    if (bn[i] == 0.0) continue;
                    const std::size_t row = (pm * grid.nu_order + i) * NT + pt2 * grid.tau_order;
                    for (int j = 0; j < grid.tau_order; ++j) {
                      const double wgt = bn[i] * bt[j];
                      if (wgt == 0.0) continue;
                      const cplx* v = D.values.data() + (row + j) * C;
                      for (int k = 0; k < C; ++k) rem[k] += wgt * v[k];
                    }
                  }
                }
                for (int zp = 0; zp < D.sheets; ++zp) {
                  const Sign szp = sheet_of(zp);
                  const cplx meas = measure(in.kind, szp, alpha, e, m);
                  if (!std::isfinite(meas.real()) || !std::isfinite(meas.imag()))
                    throw GridError("solve_density: propagator pole on the path");
                  const BornCoefficients Mb = born_coefficients(in.kind, m, szp, zeta, alpha, rho);
                  cplx d1 = born_w * Mb.m1, d2 = born_w * Mb.m2;
                  if (with_rem) {
                    d1 += mnodes[im].w * rem[zp * D.parts];
                    if (D.parts > 1) d2 += mnodes[im].w * rem[zp * D.parts + 1];
                  }
                  const cplx f = gn.w * inv_theta * meas;
                  for (int zs = 0; zs < D.sheets; ++zs) {
                    const BornCoefficients M = born_coefficients(in.kind, m, sheet_of(zs), szp, x, alpha);
                    acc[zs * D.parts] += f * ((M.m1 + M.m2 * c1) * d1 + M.m1 * c2 * d2);
                    if (D.parts > 1) acc[zs * D.parts + 1] += f * ((M.m2 + M.m1 * c1) * d2 + M.m2 * c2 * d1);
                  }
                }
              }
            }
          }
          std::copy(acc.begin(), acc.end(), D.values.begin() + ((inu * NT) + pt * grid.tau_order + c) * C);
        }
    }
  return D;
}

cplx resolvent_from_density(const DensityTable& D, const Channel& ch, double s, int row) {
  if (row < 0 || row >= D.sheets) throw std::invalid_argument("resolvent_from_density: row out of range");
  if (s > D.grid.span * (1.0 + 1e-12)) throw std::invalid_argument("resolvent_from_density: s beyond the table span");
  if (ch.N != 3) throw std::invalid_argument("resolvent_from_density: N = 3 only");
  const bool dir = dirac(D.kind);
  const int j1 = dir ? static_cast<int>(std::lround(ch.L())) : ch.l();
  const int j2 = dir ? static_cast<int>(std::lround(ch.L_partner())) : 0;
  const double x = D.rho + s;
  const double m = D.mass;
  const BornCoefficients M = born_coefficients(D.kind, m, sheet_of(row), D.zeta, x, D.rho);
  auto weights = [&](double nu) {
    const double T = cosine(x, D.rho, nu);
    return std::pair<cplx, cplx>{legendre_p(j1, cplx(T)), dir ? legendre_p(j2, cplx(T)) : cplx(0)};
  };
  cplx total = 0;
  for (auto& l : D.weight.lines()) {
    if (l.mu > s) continue;
    auto [p1, p2] = weights(l.mu);
    total += l.g * (p1 * M.m1 + p2 * M.m2);
  }
  // smooth Born part
  std::vector<Node> nodes;
  const double top = std::min(s, smooth_top(D.weight));
  auto knots = D.weight.smooth_knots();
  segment_nodes(smooth_bottom(D.weight), top, knots, 16, nodes);
  for (const Node& n : nodes) {
    const double sig = D.weight.smooth_density(n.x);
    if (sig == 0.0) continue;
    auto [p1, p2] = weights(n.x);
    total += n.w * sig * (p1 * M.m1 + p2 * M.m2);
  }
  // remainder on the nu panels, the last one cut at s
  std::vector<cplx> r(D.components());
  const GaussRule& gr = GaussRule::get(D.grid.nu_order);
  for (const Panel& p : D.nu_panels) {
    if (p.lo >= s) break;
    const double hi = std::min(p.hi, s);
    const double h = 0.5 * (hi - p.lo);
    for (int i = 0; i < D.grid.nu_order; ++i) {
      const double nu = hi == p.hi ? p.x[i] : p.lo + h * (1.0 + gr.x[i]);
      const double wt = hi == p.hi ? p.w[i] : h * gr.w[i];
      D.remainder(nu, s, r);
      auto [p1, p2] = weights(nu);
      total += wt * (p1 * r[row * D.parts] + (D.parts > 1 ? p2 * r[row * D.parts + 1] : cplx(0)));
    }
  }
  if (dir) total *= I * x / (2.0 * m);
  return total;
}

// ------------------------------------------------------------ second order

cplx physical_density_second_order(const SpectralWeight& w, double nu, cplx q, cplx p, cplx b, bool continued) {
  const double mu0 = w.mu0();
  if (!(nu >= 2.0 * mu0)) return 0.0;
  if (!w.ramps().empty()) throw std::invalid_argument("physical_density_second_order: ramps unsupported");
  const double n2 = nu * nu;
  const cplx q2 = q * q, p2 = p * p;
  cplx sq;
  if (continued) {
    // q = iu, p = i rho: Delta(q^2, p^2, -nu^2) = Delta(u^2, rho^2, nu^2) on the e^{i pi} branch
    const double u = (q / I).real(), r = (p / I).real();
    sq = -std::sqrt(std::max(0.0, triangle(u * u, r * r, n2)));
  } else {
    sq = std::sqrt(triangle(q2, p2, cplx(-n2)));
  }
  const cplx b2 = b * b;
  // real b^2 carries -i0 (outgoing), the continued form the e^{i pi} branch (+i0)
  const bool on_axis = b2.imag() == 0.0 && q.imag() == 0.0 && p.imag() == 0.0;
  const double side = continued ? 0.0 : -0.0;

  const std::vector<double> cuts = ChannelKernel::schrodinger(w, 3, 0).breakpoints(nu + mu0, 4000);
  const double wtop = smooth_top(w), wbot = smooth_bottom(w);
  std::vector<Node> gn, mn;
  for (auto& l : w.lines())
    if (l.mu <= nu - mu0 + 1e-14) gn.push_back({l.mu, l.g});
  {
    const std::size_t f = gn.size();
    segment_nodes(std::max(mu0, wbot), std::min(nu - mu0, wtop), cuts, 12, gn);
    for (std::size_t i = f; i < gn.size(); ++i) gn[i].w *= w.smooth_density(gn[i].x);
  }
  cplx total = 0;
  for (const Node& g : gn) {
    mn.clear();
    for (auto& l : w.lines())
      if (l.mu <= nu - g.x + 1e-14) mn.push_back({l.mu, l.g});
    const std::size_t f = mn.size();
    segment_nodes(std::max(mu0, wbot), std::min(nu - g.x, wtop), cuts, 12, mn);
    for (std::size_t i = f; i < mn.size(); ++i) mn[i].w *= w.smooth_density(mn[i].x);
    for (const Node& mu : mn) {
      const double m2 = mu.x * mu.x, g2 = g.x * g.x;
      const cplx omega0 = (n2 * (n2 - m2 - g2) + q2 * (n2 + m2 - g2) + p2 * (n2 - m2 + g2)) / (2.0 * n2);
      const cplx R = std::sqrt(std::max(0.0, triangle(n2, m2, g2))) * sq / (2.0 * n2);
      cplx cm = omega0 + b2 - R, cp = omega0 + b2 + R;
      if (continued || on_axis) {
        cm = cplx(cm.real(), cm.imag() == 0.0 ? side : cm.imag());
        cp = cplx(cp.real(), cp.imag() == 0.0 ? side : cp.imag());
      }
      total -= g.w * mu.w / (std::sqrt(cm) * std::sqrt(cp));
    }
  }
  return total;
}

namespace {

struct GslGuard {
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  gsl_integration_workspace* ws;
  explicit GslGuard(std::size_t n) : ws(gsl_integration_workspace_alloc(n)) {}
  ~GslGuard() {
    gsl_integration_workspace_free(ws);
    gsl_set_error_handler(old);
  }
  GslGuard(const GslGuard&) = delete;
  GslGuard& operator=(const GslGuard&) = delete;
};

template <class F>
double gsl_call(double x, void* p) {
  return (*static_cast<F*>(p))(x);
}

// Complex integral of f over [lo, hi] (hi = inf allowed), real and imaginary
// parts separately.
template <class F>
cplx integrate_complex(F&& f, double lo, double hi, double rel) {
  GslGuard g(400);
  auto re = [&](double x) { return f(x).real(); };
  auto im = [&](double x) { return f(x).imag(); };
  gsl_function fr{&gsl_call<decltype(re)>, &re}, fi{&gsl_call<decltype(im)>, &im};
  double vr = 0, vi = 0, err = 0;
  if (std::isinf(hi)) {
    gsl_integration_qagiu(&fr, lo, 1e-15, rel, 400, g.ws, &vr, &err);
    gsl_integration_qagiu(&fi, lo, 1e-15, rel, 400, g.ws, &vi, &err);
  } else {
    gsl_integration_qags(&fr, lo, hi, 1e-15, rel, 400, g.ws, &vr, &err);
    gsl_integration_qags(&fi, lo, hi, 1e-15, rel, 400, g.ws, &vi, &err);
  }
  return {vr, vi};
}

bool integer_degree(cplx l, int& out) {
  const double r = std::round(l.real());
  if (l.imag() == 0.0 && std::abs(l.real() - r) < 1e-14 && r >= 0) {
    out = static_cast<int>(r);
    return true;
  }
  return false;
}

}  // namespace

cplx legendre_q_complex(cplx nu, double Z) {
  if (!(Z > 1.0)) throw DomainError("legendre_q_complex: Z must exceed 1");
  if (!(nu.real() > -1.0)) throw DomainError("legendre_q_complex: Re nu must exceed -1");
  int l = 0;
  if (integer_degree(nu, l)) return legendre_q(l, Z);
  const double r = std::sqrt(Z * Z - 1.0);
  // log(Z + r cosh t) without overflow
  auto f = [&](double t) {
    const double L = t + std::log(0.5 * r * (1.0 + std::exp(-2.0 * t)) + Z * std::exp(-t));
    return std::exp(-(nu + 1.0) * L);
  };
  return integrate_complex(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
}

FgAmplitude fg_partial_amplitude(const SpectralWeight& w, cplx l, double q, double p, cplx b, int order) {
  if (order < 1 || order > 2) throw std::invalid_argument("fg_partial_amplitude: order must be 1 or 2");
  if (!(q > 0 && p > 0)) throw std::invalid_argument("fg_partial_amplitude: momenta must be positive");
  if (!w.continuum().empty() || !w.ramps().empty())
    throw std::invalid_argument("fg_partial_amplitude: line weights only");
  auto Zof = [&](double nu) { return (q * q + p * p + nu * nu) / (2.0 * q * p); };
  FgAmplitude out;
  for (auto& ln : w.lines()) out.born += -ln.g / (2.0 * p) * legendre_q_complex(l, Zof(ln.mu));
  if (order == 2) {
    auto integrand = [&](double nu) {
      return legendre_q_complex(l, Zof(nu)) * physical_density_second_order(w, nu, q, p, b, false);
    };
    // split at the thresholds of every line pair and at the zeros of c^2 - R^2
    std::vector<double> cuts;
    for (auto& a : w.lines())
      for (auto& c : w.lines()) cuts.push_back(a.mu + c.mu);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const cplx b2 = b * b;
    if (b2.imag() == 0.0) {
      const double n2q = q * q, n2p = p * p;
      for (auto& a : w.lines())
        for (auto& c : w.lines()) {
          const double thr = a.mu + c.mu;
          auto disc = [&](double nu) {
            const double n2 = nu * nu, m2 = a.mu * a.mu, g2 = c.mu * c.mu;
            const double om = (n2 * (n2 - m2 - g2) + n2q * (n2 + m2 - g2) + n2p * (n2 - m2 + g2)) / (2.0 * n2);
            const double R2 = triangle(n2, m2, g2) * triangle(n2q, n2p, -n2) / (4.0 * n2 * n2);
            const double cc = om + b2.real();
            return (cc * cc - R2) / (1.0 + cc * cc);
          };
          const double top = thr + 50.0 * (q + p + std::sqrt(std::abs(b2.real())) + thr);
          const int n = 4000;
          double x0 = thr * (1.0 + 1e-12), f0 = disc(x0);
          for (int i = 1; i <= n; ++i) {
            const double x1 = thr + (top - thr) * std::pow(static_cast<double>(i) / n, 2.0);
            const double f1 = disc(x1);
            if ((f0 < 0) != (f1 < 0)) {
              double lo = x0, hi = x1, flo = f0;
              for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = disc(mid);
                if ((fm < 0) == (flo < 0)) {
                  lo = mid;
                  flo = fm;
                } else {
                  hi = mid;
                }
              }
              cuts.push_back(0.5 * (lo + hi));
            }
            x0 = x1;
            f0 = f1;
          }
        }
      std::sort(cuts.begin(), cuts.end());
    }
    cplx acc = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) acc += integrate_complex(integrand, cuts[i], cuts[i + 1], 1e-10);
    acc += integrate_complex(integrand, cuts.back(), std::numeric_limits<double>::infinity(), 1e-10);
    out.second = -acc / (2.0 * p);
  }
  out.total = out.born + out.second;
  return out;
}

double born_projection(const SpectralWeight& w, int l, double q, double p) {
  const GaussRule& gr = GaussRule::get(64);
  double acc = 0;
  for (int i = 0; i < 64; ++i) {
    const double x = gr.x[i];
    const double Q2 = q * q + p * p - 2.0 * q * p * x;
    double v = 0;
    for (auto& ln : w.lines()) v += ln.g / (ln.mu * ln.mu + Q2);
    if (!w.continuum().empty())
      v += w.integrate_smooth(w.continuum().front().nu, w.continuum().back().nu,
                              [&](double nu) { return 1.0 / (nu * nu + Q2); });
    acc += gr.w[i] * legendre_p(l, cplx(x)).real() * v;
  }
  return -0.5 * q * acc;
}

HalfOffShell halfoff_consistency(const SpectralWeight& w, int l, double k, double q, const SolverConfig& cfg) {
  const ChannelKernel K = ChannelKernel::schrodinger(w, 3, l);
  const EnergyPoint e = EnergyPoint::from_k(k);
  SolverConfig c = cfg;
  c.estimate_error = false;
  const cplx Fq = osjf(K, e, cplx(0.0, q), Sign::plus(), c);
  const cplx Fmq = osjf(K, e, cplx(0.0, -q), Sign::plus(), c);
  const cplx Fout = jost_function(K, e, c).value;
  const cplx Fin = jost_function(K, EnergyPoint{cplx(0.0, k)}, c).value;
  HalfOffShell h;
  h.from_osjf = std::pow(k / q, l) * (Fq - Fmq) / (2.0 * I * Fout);
  h.from_fg = fg_partial_amplitude(w, static_cast<double>(l), q, k, e.b, 2).total;
  const double delta = phase_shift(Fin, Fout);
  h.unitary = std::exp(I * delta) * std::sin(delta);
  h.mismatch = std::abs(h.from_osjf - h.from_fg) / std::abs(h.from_osjf);
  h.onshell_mismatch = std::abs(q - k) < 1e-14 * k ? std::abs(h.from_osjf - h.unitary) / std::abs(h.unitary) : 0.0;
  return h;
}

}  // namespace jost
