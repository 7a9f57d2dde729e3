#include "jost/density.hpp"

#include <doctest.h>

#include <cmath>

using namespace jost;
using doctest::Approx;

TEST_CASE("Born coefficients of the local Schroedinger kind") {
  const auto c = born_coefficients(InteractionKind::SchrodingerLocal, 1.0, Sign::plus(), Sign::plus(), 1.0, 2.0);
  CHECK(c.m1 == cplx(1.0));
  CHECK(c.m2 == cplx(0.0));
}

TEST_CASE("density reproduces the Schroedinger resolvent for several l") {
  const SpectralWeight w = SpectralWeight::yukawa(-1.0, 1.0);
  Interaction in;
  in.sigma = w;
  const double rho = 0.5;
  const EnergyPoint e{cplx(0.3)};
  DensityGrid g;
  g.span = 4;
  const DensityTable D = solve_density(in, rho, e, Sign::plus(), g);
  SolverConfig c;
  c.s_max = 4;
  c.estimate_error = false;
  for (int l = 0; l < 3; ++l) {
    const ResolventTable R = solve_resolvent(ChannelKernel::schrodinger(w, 3, l), e, rho, c);
    for (double s : {1.5, 2.5, 3.9}) {
      const cplx a = resolvent_from_density(D, Channel{3, 2 * l + 1, Sign::minus()}, s, 0);
      const cplx b = R.value(s, 0, 0);
      CHECK(std::abs(a - b) < 1e-6 * std::max(1e-3, std::abs(b)));
    }
  }
}

TEST_CASE("zero coupling gives an empty remainder") {
  Interaction in;
  in.sigma = SpectralWeight::yukawa(0.0, 1.0);
  DensityGrid g;
  g.span = 3;
  const DensityTable D = solve_density(in, 0.5, EnergyPoint{cplx(0.3)}, Sign::plus(), g);
  std::vector<cplx> out(D.components());
  D.remainder(2.5, 2.9, out);
  CHECK(std::abs(out[0]) == 0.0);
}

TEST_CASE("density rejects unsupported kinds") {
  Interaction in;
  in.kind = InteractionKind::SchrodingerRelCorr;
  in.sigma = SpectralWeight::yukawa(1.0, 1.0);
  CHECK_THROWS(solve_density(in, 0.5, EnergyPoint{cplx(0.3)}, Sign::plus()));
}

TEST_CASE("Froissart-Gribov Born term matches the angular projection") {
  const SpectralWeight w = SpectralWeight::yukawa(0.2, 1.0);
  for (int l : {0, 1, 2}) {
    const auto a = fg_partial_amplitude(w, cplx(l), 1.1, 0.8, cplx(0, -0.8), 1);
    CHECK(std::abs(a.born - born_projection(w, l, 1.1, 0.8)) < 1e-6 * std::abs(a.born));
  }
  const auto zero = fg_partial_amplitude(SpectralWeight::yukawa(0.0, 1.0), cplx(0), 1.1, 0.8, cplx(0, -0.8), 2);
  CHECK(std::abs(zero.total) == 0.0);
}

TEST_CASE("complex-degree Legendre Q reduces to the integer one") {
  for (int l : {0, 1, 3}) CHECK(legendre_q_complex(cplx(l), 1.7).real() == Approx(legendre_q(l, 1.7)).epsilon(1e-9));
}
