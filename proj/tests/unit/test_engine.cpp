#include "jost/engine.hpp"

#include <doctest.h>

#include <cmath>

using namespace jost;
using doctest::Approx;

namespace {
SolverConfig quick() {
  SolverConfig c;
  c.estimate_error = false;
  return c;
}
}  // namespace

TEST_CASE("Schroedinger kernel of a single line") {
  const SpectralWeight w = SpectralWeight::yukawa(0.7, 1.0);
  CHECK(kernel_schrodinger(w, 0, 3, 3.0, 1.0) == Approx(0.7));
  CHECK(kernel_schrodinger(w, 0, 3, 1.5, 1.0) == 0.0);
  const double u = 3.0, rho = 1.2;
  CHECK(kernel_schrodinger(w, 1, 3, u, rho) == Approx(0.7 * (u * u + rho * rho - 1.0) / (2 * u * rho)));
}

TEST_CASE("vector and scalar Dirac kernels differ only in the second term") {
  const SpectralWeight w = SpectralWeight::yukawa(0.3, 1.0);
  const Channel ch{3, 1, Sign::plus()};
  const double u = 3.0, rho = 1.5, m = 1.0;
  for (Sign zp : {Sign::plus(), Sign::minus()})
    for (Sign z : {Sign::plus(), Sign::minus()}) {
      const cplx v = kernel_dirac(w, ch, InteractionKind::DiracVector, m, zp, z, u, rho);
      const cplx s = kernel_dirac(w, ch, InteractionKind::DiracScalar, m, zp, z, u, rho);
      CHECK(std::isfinite(std::abs(v - s)));
    }
  CHECK(kernel_dirac(SpectralWeight{}, ch, InteractionKind::DiracVector, m, Sign::plus(), Sign::plus(), u, rho) ==
        cplx(0.0));
}

TEST_CASE("free Jost function is one") {
  const ChannelKernel K = ChannelKernel::schrodinger(SpectralWeight{}, 3, 0);
  const JostResult r = jost_function(K, EnergyPoint::from_k(1.0), quick());
  CHECK(std::abs(r.value - 1.0) < 1e-14);
}

TEST_CASE("first Born term of the Yukawa Jost function") {
  // F = 1 + (g/2b) ln(1 + 2b/mu) + O(g^2) at b = 1, mu = 1, g = 0.01
  const double g = 0.01;
  const ChannelKernel K = ChannelKernel::schrodinger(SpectralWeight::yukawa(g, 1.0), 3, 0);
  const JostResult r = jost_function(K, EnergyPoint{cplx(1.0)}, quick());
  CHECK(std::abs(r.value - (1.0 + 0.005 * std::log(3.0))) < 10 * g * g);
}

TEST_CASE("Volterra resolvent agrees with its Neumann series") {
  const SpectralWeight w = SpectralWeight::yukawa(0.4, 1.0);
  const ChannelKernel K = ChannelKernel::schrodinger(w, 3, 1);
  const EnergyPoint e{cplx(0.8)};
  SolverConfig c = quick();
  c.s_max = 6;
  const RaySolution a = solve_ray(K, e, 1.0, 0, Direction::Up, c);
  const RaySolution b = neumann_ray(K, e, 1.0, 0, c, 6.0, 10);
  for (double s : {1.5, 3.0, 5.5}) {
    std::vector<cplx> x(1), y(1);
    a.eval(s, x);
    b.eval(s, y);
    CHECK(std::abs(x[0] - y[0]) < 1e-10 * std::max(1.0, std::abs(x[0])));
  }
}

TEST_CASE("phase shift of a unitary pair") {
  CHECK(phase_shift(1.0, 1.0) == 0.0);
  const cplx F = std::polar(1.3, -0.4);
  CHECK(phase_shift(std::conj(F), F) == Approx(0.4));
}

TEST_CASE("determinant product") {
  std::vector<JostResult> ones(3);
  for (std::size_t i = 0; i < ones.size(); ++i) ones[i].channel = Channel{3, int(2 * i + 1), Sign::plus()};
  CHECK(std::abs(determinant_product(ones, 3, 2.5).value - 1.0) < 1e-15);
  std::vector<JostResult> one(1);
  one[0].value = cplx(0.9, 0.1);
  one[0].channel = Channel{3, 1, Sign::plus()};
  CHECK(std::abs(determinant_product(one, 3, 0.5).value - std::pow(cplx(0.9, 0.1), 2.0)) < 1e-14);
}

TEST_CASE("repulsive Yukawa has no bound states on the Volterra route") {
  const ChannelKernel K = ChannelKernel::schrodinger(SpectralWeight::yukawa(0.5, 1.0), 3, 0);
  const SolverConfig c = quick();
  int changes = 0;
  double prev = jost_function(K, EnergyPoint{cplx(0.05)}, c).value.real();
  for (double b = 0.25; b < 3.0; b += 0.2) {
    const double cur = jost_function(K, EnergyPoint{cplx(b)}, c).value.real();
    changes += (cur * prev < 0);
    prev = cur;
  }
  CHECK(changes == 0);
}

TEST_CASE("solver configuration validation") {
  SolverConfig c;
  c.order = 0;
  CHECK_THROWS(c.validate());
  SolverConfig d;
  d.ratio = 0.5;
  CHECK_THROWS(d.validate());
}
