#include "jost/cli/selftest.hpp"

#include "jost/density.hpp"
#include "jost/engine.hpp"
#include "jost/oracle.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace jost::cli {

namespace {

constexpr double pi = std::numbers::pi;

class Quad {
 public:
  Quad() : ws_(gsl_integration_workspace_alloc(limit)) {}
  ~Quad() { gsl_integration_workspace_free(ws_); }
  Quad(const Quad&) = delete;
  Quad& operator=(const Quad&) = delete;

  double finite(const std::function<double(double)>& f, double a, double b, double rel = 1e-12) {
    gsl_function F{thunk, const_cast<std::function<double(double)>*>(&f)};
    double v = 0, err = 0;
    gsl_integration_qags(&F, a, b, 1e-15, rel, limit, ws_, &v, &err);
    return v;
  }
  double upper(const std::function<double(double)>& f, double a, double rel = 1e-12) {
    gsl_function F{thunk, const_cast<std::function<double(double)>*>(&f)};
    double v = 0, err = 0;
    gsl_integration_qagiu(&F, a, 1e-15, rel, limit, ws_, &v, &err);
    return v;
  }

 private:
  static constexpr std::size_t limit = 2000;
  static double thunk(double x, void* p) { return (*static_cast<std::function<double(double)>*>(p))(x); }
  gsl_integration_workspace* ws_;
};

double P(int l, double t) { return legendre_p(l, cplx(t)).real(); }

CheckResult finish(CheckResult r) {
  r.passed = r.lower_bound ? r.measured > r.tolerance : r.measured <= r.tolerance;
  return r;
}

using Mat = std::array<cplx, 4>;

Mat product(const Mat& a, const Mat& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

// (sigma . a)(sigma . b) for real vectors
Mat sigma_pair(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const Mat sa{cplx(a[2]), cplx(a[0], -a[1]), cplx(a[0], a[1]), cplx(-a[2])};
  const Mat sb{cplx(b[2]), cplx(b[0], -b[1]), cplx(b[0], b[1]), cplx(-b[2])};
  return product(sa, sb);
}

std::array<double, 3> unit(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Interaction dirac_yukawa(InteractionKind kind) { return Interaction{kind, 1.0, SpectralWeight::yukawa(0.3, 1.0), {}}; }

}  // namespace

CheckResult check_legendre_chi_integral() {
  CheckResult r{"legendre-chi-integral", "identity", "gsl-qagiu", 0, 1e-5};
  Quad q;
  const double rho = 0.7, nu = 1.3;
  for (int j = 0; j <= 2; ++j)
    for (double rr : {0.5, 1.0, 2.0}) {
      const double lhs = q.upper([&](double u) { return P(j, cosine(u, rho, nu)) * chi(double(j), u * rr); }, rho + nu);
      const double rhs = std::exp(-nu * rr) * chi(double(j), rho * rr) / rr;
      r.measured = std::max(r.measured, std::abs(lhs - rhs) / std::abs(rhs));
    }
  r.detail = "j = 0..2, r in {0.5, 1, 2}, rho = 0.7, nu = 1.3";
  return finish(r);
}

CheckResult check_legendre_q_representation() {
  CheckResult r{"legendre-q-representation", "identity", "gsl-qagiu", 0, 1e-5};
  Quad q;
  const std::array<std::array<double, 3>, 3> samples{{{1.3, 0.8, 0.9}, {0.6, 1.5, 2.0}, {2.0, 0.5, 0.4}}};
  for (auto [u, nu, k] : samples)
    for (int j = 0; j <= 1; ++j) {
      const double lhs = q.upper(
          [&](double a) { return P(j, cosine(u, a, nu)) / (a * a + k * k) * std::pow(u / a, j); }, u + nu);
      const double rhs = q.upper(
          [&](double s) {
            const double Z = (s * s + k * k + nu * nu) / (2 * s * k);
            return 2 * s * legendre_q(j, Z) / (2 * pi * k * (s * s + u * u)) * std::pow(s / k, j);
          },
          0.0);
      r.measured = std::max(r.measured, std::abs(lhs - rhs) / std::abs(rhs));
    }
  r.detail = "j = 0, 1 at three (u, nu, k) samples";
  return finish(r);
}

CheckResult check_integration_reorder() {
  CheckResult r{"integration-reorder", "identity", "gsl-qags+gauss-chebyshev", 0, 1e-5};
  Quad outer;
  const double u = 5.0, rho = 0.7, gamma = 1.0, mu = 1.3;
  auto H = [](double a) { return std::exp(-a); };
  const auto theta = chebyshev_nodes(64);
  for (int l = 0; l <= 1; ++l) {
    const double lhs = outer.finite(
        [&](double a) { return P(l, cosine(u, a, gamma)) * P(l, cosine(a, rho, mu)) * H(a); }, rho + mu, u - gamma);
    const double rhs = outer.finite(
        [&](double nu) {
          const LambdaBounds lb = lambda_bounds(nu, mu, gamma, u, rho);
          double avg = 0;
          for (double c : theta) avg += H(std::sqrt(lb.mid() + lb.half() * c));
          return P(l, cosine(u, rho, nu)) * avg / theta.size();
        },
        gamma + mu, u - rho);
    r.measured = std::max(r.measured, std::abs(lhs - rhs) / std::abs(lhs));
  }
  r.detail = "l = 0, 1 with H = exp(-alpha), u = 5, rho = 0.7";
  return finish(r);
}

CheckResult check_projector_orthogonality() {
  CheckResult r{"projector-orthogonality", "identity", "gauss-sphere", 0, 1e-6};
  const auto omega = unit(0.7, 0.3), v = unit(2.1, 4.0);
  const GaussRule& gl = GaussRule::get(24);
  const int n_phi = 48;
  for (int tj = 1; tj <= 5; tj += 2)
    for (int tj2 = 1; tj2 <= 5; tj2 += 2)
      for (Sign xi : {Sign::plus(), Sign::minus()})
        for (Sign sg : {Sign::plus(), Sign::minus()}) {
          const Channel a{3, tj, xi}, b{3, tj2, sg};
          Mat acc{};
          for (std::size_t i = 0; i < gl.x.size(); ++i)
            for (int p = 0; p < n_phi; ++p) {
              const auto n = unit(std::acos(gl.x[i]), 2 * pi * p / n_phi);
              const Mat m = product(projector_matrix(a, omega, n), projector_matrix(b, n, v));
              for (int e = 0; e < 4; ++e) acc[e] += gl.w[i] * (2 * pi / n_phi) * m[e];
            }
          Mat expect{};
          if (tj == tj2 && xi == sg) expect = projector_matrix(a, omega, v);
          for (int e = 0; e < 4; ++e) r.measured = std::max(r.measured, std::abs(acc[e] - expect[e]));
        }
  // trace at coincident directions integrates to the degeneracy
  for (int tj = 1; tj <= 5; tj += 2)
    for (Sign xi : {Sign::plus(), Sign::minus()}) {
      const Channel ch{3, tj, xi};
      const Mat m = projector_matrix(ch, v, v);
      const double tr = 4 * pi * (m[0] + m[3]).real();
      r.measured = std::max(r.measured, std::abs(tr - double(ch.degeneracy())));
    }
  r.detail = "N = 3, J <= 5/2, both spin-orbit signs; trace vs degeneracy";
  return finish(r);
}

CheckResult check_projector_series() {
  CheckResult r{"projector-series", "identity", "partial-sum", 0, 1e-6};
  const double Z = 2.0;
  const auto tau = unit(0.4, 1.1);
  int max_terms = 0;
  for (double theta : {0.45, 1.2, 2.0, 2.6}) {
    const auto v = unit(0.4 + theta, 1.1);
    const double t = tau[0] * v[0] + tau[1] * v[1] + tau[2] * v[2];
    if (std::abs(t) > 0.9) continue;
    Mat first{}, second{};
    int J2 = 1;
    for (; J2 < 400; J2 += 2) {
      double change = 0;
      for (Sign xi : {Sign::plus(), Sign::minus()}) {
        const Channel ch{3, J2, xi}, mirror{3, J2, -xi};
        const double S = legendre_s(ch.L(), 0.0, Z);
        const Mat p1 = projector_matrix(ch, tau, v), p2 = projector_matrix(mirror, tau, v);
        for (int e = 0; e < 4; ++e) {
          first[e] += 4 * pi * S * p1[e];
          second[e] += 4 * pi * S * p2[e];
          change = std::max({change, std::abs(4 * pi * S * p1[e]), std::abs(4 * pi * S * p2[e])});
        }
      }
      if (change < 1e-15) break;
    }
    max_terms = std::max(max_terms, J2);
    const Mat sp = sigma_pair(tau, v);
    for (int e = 0; e < 4; ++e) {
      const cplx id = (e == 0 || e == 3) ? 1.0 : 0.0;
      r.measured = std::max(r.measured, std::abs(first[e] - id / (Z - t)));
      r.measured = std::max(r.measured, std::abs(second[e] - sp[e] / (Z - t)));
    }
  }
  r.detail = fmt::format("Z = 2, four directions with |tau.v| <= 0.9, 2J_max = {}", max_terms);
  return finish(r);
}

CheckResult check_gegenbauer_recurrence() {
  CheckResult r{"gegenbauer-recurrence", "identity", "gegenbauer", 0, 1e-12};
  for (double lam : {0.5, 1.0, 1.5, 2.0, 2.5})
    for (int l = 0; l <= 10; ++l)
      for (int xi : {1, -1})
        for (double z : {-0.93, -0.4, 0.0, 0.35, 0.8, 1.0}) {
          // C^{lambda+1}_{-1} and lower indices are the zero polynomial
          auto C = [](double lm, int n, double x) { return n < 0 ? 0.0 : gegenbauer(lm, n, x); };
          const double lhs = z * C(lam + 1, l - 1, z) - C(lam + 1, l - 1 - xi, z);
          const double rhs = xi / (2 * lam) * (l + lam * (1 - xi)) * C(lam, l, z);
          r.measured = std::max(r.measured, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
  r.detail = "l <= 10, lambda in {1/2 .. 5/2}";
  return finish(r);
}

CheckResult check_resolvent_symmetry(double fault) {
  CheckResult r{"resolvent-exchange-symmetry", "symmetry", "volterra", 0, 1e-8};
  const double rho = 1.5, u = 4.0;
  SolverConfig cfg;
  cfg.s_max = u - rho + 1.0;
  cfg.estimate_error = false;
  for (auto kind : {InteractionKind::DiracVector, InteractionKind::DiracScalar})
    for (Sign zb : {Sign::plus(), Sign::minus()}) {
      const EnergyPoint e{cplx(0.5, 0.2), zb, 1.0};
      const ChannelKernel K = ChannelKernel::make(dirac_yukawa(kind), Channel{3, 1, Sign::plus()}).perturbed(fault);
      const ResolventTable right = solve_resolvent(K, e, rho, cfg);
      const ResolventTable left = solve_resolvent(K, e, cplx(-u), cfg);
      for (int zp = 0; zp < 2; ++zp)
        for (int z = 0; z < 2; ++z) {
          const cplx lhs = right.value(u - rho, zp, z);
          const cplx factor = eta(sheet_of(z), rho, 1.0) * u / (eta(sheet_of(zp), u, 1.0) * rho);
          const cplx rhs = factor * left.value(u - rho, z, zp);
          r.measured = std::max(r.measured, std::abs(lhs - rhs) / std::abs(lhs));
        }
    }
  r.detail = fmt::format("Dirac vector/scalar g = 0.3, rho = 1.5, u = 4, both sheets, fault = {:g}", fault);
  return finish(r);
}

CheckResult check_density_symmetry() {
  CheckResult r{"density-exchange-symmetry", "symmetry", "density", 0, 1e-8};
  const double rho = 1.5, u = 5.0;
  DensityGrid grid;
  grid.span = u - rho;
  for (auto kind : {InteractionKind::DiracVector, InteractionKind::DiracScalar}) {
    const Interaction in = dirac_yukawa(kind);
    const EnergyPoint e{cplx(0.5, 0.2), Sign::plus(), 1.0};
    for (int z = 0; z < 2; ++z) {
      const DensityTable D = solve_density(in, rho, e, sheet_of(z), grid);
      for (int zp = 0; zp < 2; ++zp) {
        const DensityTable E = solve_density(in, -u, e, sheet_of(zp), grid);
        double scale = 0, worst = 0;
        for (double nu : {2.3, 2.7, 3.1}) {
          std::vector<cplx> a(D.components()), b(E.components());
          D.remainder(nu, u - rho, a);
          E.remainder(nu, u - rho, b);
          for (int part = 0; part < D.parts; ++part) {
            const cplx lhs = a[zp * D.parts + part];
            const cplx rhs = -eta(sheet_of(z), rho, 1.0) / eta(sheet_of(zp), u, 1.0) * b[z * E.parts + part];
            scale = std::max(scale, std::abs(lhs));
            worst = std::max(worst, std::abs(lhs - rhs));
          }
        }
        r.measured = std::max(r.measured, worst / scale);
      }
    }
  }
  r.detail = "remainder densities, start rho = 1.5 against start -u = -5";
  return finish(r);
}

CheckResult check_cpt() {
  CheckResult r{"cpt-pairs", "symmetry", "volterra", 0, 1e-8};
  SolverConfig cfg;
  cfg.estimate_error = false;
  const SpectralWeight w = SpectralWeight::yukawa(0.3, 1.0);
  for (auto kind : {InteractionKind::DiracVector, InteractionKind::DiracScalar})
    for (Sign xi : {Sign::plus(), Sign::minus()})
      for (Sign zb : {Sign::plus(), Sign::minus()})
        for (double b : {0.5, 1.5}) {
          const auto [F, G] = cpt_check(w, kind, Channel{3, 1, xi}, EnergyPoint{cplx(b), zb, 1.0}, cfg);
          r.measured = std::max(r.measured, std::abs(F.value - G.value) / std::abs(F.value));
        }
  r.detail = "kappa = +-1, b in {0.5, 1.5}, both sheets, vector and scalar";
  return finish(r);
}

CheckResult check_factorization() {
  CheckResult r{"j-factorization", "factorization", "density+volterra", 0, 1e-5};
  const double rho = 1.5;
  DensityGrid grid;
  grid.span = 5;
  SolverConfig cfg;
  cfg.s_max = grid.span;
  cfg.estimate_error = false;
  for (auto kind : {InteractionKind::DiracVector, InteractionKind::DiracScalar})
    for (Sign zb : {Sign::plus(), Sign::minus()}) {
      const Interaction in = dirac_yukawa(kind);
      const EnergyPoint e{cplx(0.5), zb, 1.0};
      for (int col = 0; col < 2; ++col) {
        const DensityTable D = solve_density(in, rho, e, sheet_of(col), grid);
        for (int tj : {1, 3})
          for (Sign xi : {Sign::plus(), Sign::minus()}) {
            const Channel ch{3, tj, xi};
            const ResolventTable R = solve_resolvent(ChannelKernel::make(in, ch), e, rho, cfg);
            for (double s : {1.5, 2.5, 4.0, 4.9})
              for (int row = 0; row < 2; ++row) {
                const cplx a = resolvent_from_density(D, ch, s, row), b = R.value(s, row, col);
                r.measured = std::max(r.measured, std::abs(a - b) / std::max(1e-3, std::abs(b)));
              }
          }
      }
    }
  r.detail = "J in {1/2, 3/2}, xi = +-1, one density table per start sheet";
  return finish(r);
}

CheckResult check_continuation() {
  CheckResult r{"density-continuation", "continuation", "density-order-2", 0, 1e-4};
  const SpectralWeight w = SpectralWeight::yukawa(-1.0, 1.0);
  Interaction in;
  in.sigma = w;
  const double rho = 0.5;
  const EnergyPoint e{cplx(0.3)};
  DensityGrid grid;
  grid.span = 6;
  grid.max_order = 2;
  const DensityTable D = solve_density(in, rho, e, Sign::plus(), grid);
  for (double nu : {2.2, 3.0, 4.5})
    for (double s : {4.6, 5.5}) {
      std::vector<cplx> rem(1);
      D.remainder(nu, s, rem);
      const cplx p = physical_density_second_order(w, nu, cplx(0, rho + s), cplx(0, rho), e.b, true);
      r.measured = std::max(r.measured, std::abs(rem[0] - p) / std::abs(p));
    }
  r.detail = "Schroedinger Yukawa g = -1 second-order density, physical form at (p, q) = (i rho, i u)";
  return finish(r);
}

std::vector<CheckResult> check_dispersion() {
  std::vector<CheckResult> out;
  SolverConfig cfg;
  cfg.estimate_error = false;
  DispersionConfig dcfg;
  dcfg.points = 240;
  const cplx b_eval(0.7, 0.0);
  struct Case {
    std::vector<std::pair<double, double>> table;
    std::vector<double> bound;
    cplx F;
  };
  auto prepare = [&](double g) {
    const ChannelKernel K = ChannelKernel::schrodinger(SpectralWeight::yukawa(g, 1.0), 3, 0);
    Case c;
    c.table = phase_table(K, cfg, dcfg);
    if (g < 0)
      c.bound = bound_states(
          [&](double b) { return jost_function(K, EnergyPoint{cplx(b)}, cfg).value.real(); }, 0.02, 3.0, 1e-12, 60);
    c.F = jost_function(K, EnergyPoint{b_eval}, cfg).value;
    return c;
  };
  auto mismatch = [&](const Case& c, bool use_bound_factor) {
    auto phase = [&](double eps) {
      auto it = std::lower_bound(c.table.begin(), c.table.end(), eps, [](auto& p, double x) { return p.first < x; });
      if (it != c.table.end() && std::abs(it->first - eps) <= 1e-12 * eps) return it->second;
      throw GridError("dispersion: phase requested off the table grid");
    };
    const std::vector<double> none;
    return dispersion_check(phase, use_bound_factor ? c.bound : none, b_eval, c.F, dcfg).mismatch;
  };
  {
    CheckResult r{"dispersion-repulsive", "dispersion", "volterra-phase-table", 0, 1e-3};
    r.measured = mismatch(prepare(0.5), true);
    r.detail = "Yukawa g = 0.5, mu = 1, l = 0, b = 0.7";
    out.push_back(finish(r));
  }
  const Case attractive = prepare(-2.5);
  {
    CheckResult r{"dispersion-bound", "dispersion", "volterra-phase-table", 0, 1e-3};
    r.measured = mismatch(attractive, true);
    r.detail = fmt::format("Yukawa g = -2.5, mu = 1, l = 0, {} bound state(s)", attractive.bound.size());
    if (attractive.bound.size() != 1) r.measured = std::max(r.measured, 1.0);
    out.push_back(finish(r));
  }
  {
    CheckResult r{"dispersion-no-bound-factor", "dispersion", "negative-control", 0, 1e-2, true};
    r.measured = mismatch(attractive, false);
    r.detail = "same attractive case without the (1 - W_1/W) factor; must exceed the bound";
    out.push_back(finish(r));
  }
  return out;
}

std::vector<CheckResult> run_selftest(const SelftestOptions& opt) {
  std::vector<CheckResult> out;
  auto guarded = [&](const std::string& id, const std::string& group, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      CheckResult r{id, group, "error", std::nan(""), 0};
      r.detail = e.what();
      out.push_back(r);
    }
  };
  guarded("legendre-chi-integral", "identity", [&] { out.push_back(check_legendre_chi_integral()); });
  guarded("legendre-q-representation", "identity", [&] { out.push_back(check_legendre_q_representation()); });
  guarded("integration-reorder", "identity", [&] { out.push_back(check_integration_reorder()); });
  guarded("projector-orthogonality", "identity", [&] { out.push_back(check_projector_orthogonality()); });
  guarded("projector-series", "identity", [&] { out.push_back(check_projector_series()); });
  guarded("gegenbauer-recurrence", "identity", [&] { out.push_back(check_gegenbauer_recurrence()); });
  guarded("density-exchange-symmetry", "symmetry", [&] { out.push_back(check_density_symmetry()); });
  guarded("resolvent-exchange-symmetry", "symmetry", [&] { out.push_back(check_resolvent_symmetry(opt.fault)); });
  guarded("cpt-pairs", "symmetry", [&] { out.push_back(check_cpt()); });
  guarded("j-factorization", "factorization", [&] { out.push_back(check_factorization()); });
  guarded("density-continuation", "continuation", [&] { out.push_back(check_continuation()); });
  guarded("dispersion", "dispersion", [&] {
    for (auto& r : check_dispersion()) out.push_back(r);
  });
  return out;
}

}  // namespace jost::cli
