#include "jost/potential.hpp"
#include "jost/specfun.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace jost;
using doctest::Approx;

TEST_CASE("Yukawa potential values") {
  CHECK(evaluate_potential(SpectralWeight::yukawa(1.0, 1.0), 3, 2.0) == Approx(std::exp(-2.0) / 2).epsilon(1e-14));
  CHECK(evaluate_potential(SpectralWeight{}, 3, 1.0) == 0.0);
  const SpectralWeight two({{1.0, 1.0}, {-0.5, 2.0}});
  CHECK(evaluate_potential(two, 3, 1.0) == Approx(std::exp(-1.0) - 0.5 * std::exp(-2.0)).epsilon(1e-14));
  CHECK_THROWS(evaluate_potential(two, 3, -1.0));
}

TEST_CASE("moments") {
  CHECK(moments(SpectralWeight::yukawa(0.7, 1.5), 3) == Approx(0.7 * std::pow(1.5, 3)));
  CHECK(moments(SpectralWeight{}, 2) == 0.0);
  CHECK(moments(SpectralWeight::yukawa(2.0, 3.0), 2) == Approx(18.0));
  // ramps have divergent moments
  CHECK_THROWS_AS(moments(SpectralWeight({}, {}, {{1.0, 1.0}}), 0), DivergenceError);
}

TEST_CASE("linearity in the weight") {
  const SpectralWeight a({{0.4, 1.0}}, {{1.5, 0.0}, {2.0, 0.3}, {3.0, 0.0}});
  const SpectralWeight b({{-1.1, 2.5}});
  const SpectralWeight c = a.scaled(2.0).plus(b.scaled(-3.0));
  for (double r : {0.1, 1.0, 4.0}) {
    const double lhs = evaluate_potential(c, 3, r);
    const double rhs = 2 * evaluate_potential(a, 3, r) - 3 * evaluate_potential(b, 3, r);
    CHECK(lhs == Approx(rhs).epsilon(1e-13));
  }
  CHECK(moments(c, 1) == Approx(2 * moments(a, 1) - 3 * moments(b, 1)).epsilon(1e-13));
}

TEST_CASE("continuum potential against direct quadrature") {
  // triangle density 0 -> 1 -> 0 on [1, 3]
  const SpectralWeight w({}, {{1.0, 0.0}, {2.0, 1.0}, {3.0, 0.0}});
  const double r = 0.8;
  double ref = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double nu = 1.0 + 2.0 * (i + 0.5) / n;
    ref += w.smooth_density(nu) * std::exp(-nu * r) / r * (2.0 / n);
  }
  CHECK(evaluate_potential(w, 3, r) == Approx(ref).epsilon(1e-7));
}

TEST_CASE("momentum-space matrix element of a Yukawa line") {
  // <q|V|p> = g / (Q^2 + mu^2) up to the 4 pi / (2 pi)^3 convention fixed by the zero-Q limit ratio
  const SpectralWeight w = SpectralWeight::yukawa(1.0, 1.5);
  const double v0 = potential_momentum(w, 3, 0.0);
  for (double Q : {0.5, 1.0, 3.0}) CHECK(potential_momentum(w, 3, Q) / v0 == Approx(2.25 / (Q * Q + 2.25)).epsilon(1e-10));
}

TEST_CASE("Weyl transform trivial cases") {
  const SpectralWeight w({}, {{1.0, 0.0}, {2.0, 1.0}, {3.0, 0.5}, {4.0, 0.0}});
  const SpectralWeight same = weyl_transform(w, 3, 3, 0);
  for (double nu : {1.5, 2.0, 3.2}) CHECK(same.smooth_density(nu) == Approx(w.smooth_density(nu)).epsilon(1e-12));
  const SpectralWeight zero = weyl_transform(SpectralWeight({}, {{1.0, 0.0}, {2.0, 0.0}}), 3, 5, 1);
  CHECK(zero.smooth_density(1.5) == 0.0);
  CHECK_THROWS_AS(weyl_transform(w, 3, 5, 0), DomainError);
  CHECK_THROWS_AS(weyl_transform(SpectralWeight::yukawa(1, 1), 3, 5, 1), DomainError);
}

TEST_CASE("relativistic-correction weight of a line") {
  const SpectralWeight w = SpectralWeight::yukawa(0.8, 1.2);
  const double m = 1.5, c = 1.0 / (4 * m * m);
  const SpectralWeight plus = relcorr_weight(w, Channel{3, 1, Sign::plus()}, m);
  REQUIRE(plus.lines().size() == 1);
  CHECK(plus.lines()[0].g == Approx(0.8 * (1 + 0.5 * c * 1.44)));
  CHECK(plus.smooth_density(2.0) == Approx(2.0 * 0.8 * 2.0 * c));  // (1 + kappa) nu g c with kappa = 1
  const SpectralWeight minus = relcorr_weight(w, Channel{3, 1, Sign::minus()}, m);
  CHECK(minus.smooth_density(2.0) == 0.0);
  const SpectralWeight heavy = relcorr_weight(w, Channel{3, 1, Sign::plus()}, 1e8);
  CHECK(heavy.lines()[0].g == Approx(0.8).epsilon(1e-12));
}

TEST_CASE("weight file parsing") {
  std::istringstream good("# comment\nkind dirac-vector 2.0\nline 0.3 1.0\ncont 2.0 0.0\ncont 3.0 0.4\ncont 4.0 0.0\n");
  const Interaction in = parse_weight(good);
  CHECK(in.kind == InteractionKind::DiracVector);
  CHECK(in.mass == 2.0);
  CHECK(in.sigma.lines().size() == 1);
  CHECK(in.sigma.continuum().size() == 3);
  CHECK(in.sigma.mu0() == 1.0);
  std::istringstream bad("line 0.3\n");
  CHECK_THROWS_AS(parse_weight(bad), WeightParseError);
}
