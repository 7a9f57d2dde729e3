#include "jost/renorm.hpp"

#include <doctest.h>

#include <cmath>

using namespace jost;
using doctest::Approx;

TEST_CASE("convergence conditions on the second weight") {
  CHECK_FALSE(convergence_conditions(SpectralWeight::yukawa(1.0, 1.0)).ok);
  const auto two = convergence_conditions(SpectralWeight({{1.0, 1.0}, {-1.0, 2.0}}));
  CHECK(two.ok);
  CHECK(two.I1 == Approx(-1.0));
  CHECK(convergence_conditions(SpectralWeight{}).ok);
}

TEST_CASE("relativistic-correction potential tends to the base potential for heavy mass") {
  const SpectralWeight w = SpectralWeight::yukawa(1.0, 1.0);
  const Channel ch{3, 1, Sign::plus()};
  for (double r : {0.5, 2.0}) CHECK(partial_potential_relcorr(w, ch, 1e6, r) == Approx(evaluate_potential(w, 3, r)).epsilon(1e-8));
}

TEST_CASE("relativistic-correction small-r power") {
  const SpectralWeight w = SpectralWeight::yukawa(1.0, 1.0);
  const Channel plus{3, 1, Sign::plus()};
  const double r1 = 1e-3, r2 = 2e-3;
  const double slope = std::log(std::abs(partial_potential_relcorr(w, plus, 1.0, r2) /
                                         partial_potential_relcorr(w, plus, 1.0, r1))) / std::log(2.0);
  CHECK(slope == Approx(-3.0).epsilon(1e-2));
}

TEST_CASE("renormalized OSJF of a regular kernel equals the plain one") {
  const ChannelKernel K = ChannelKernel::schrodinger(SpectralWeight::yukawa(-1.0, 1.0), 3, 1);
  const EnergyPoint e = EnergyPoint::from_k(1.0);
  SolverConfig c;
  c.estimate_error = false;
  RegulatorConfig rc;
  rc.solver = c;
  const auto r = renormalized_osjf(K, e, 1.5, rc);
  CHECK(std::abs(r.value - osjf(K, e, 1.5, Sign::plus(), c)) < 1e-8);
}

TEST_CASE("homogeneous solution of a bounded kernel is trivial") {
  const ChannelKernel K = ChannelKernel::schrodinger(SpectralWeight::yukawa(1.0, 1.0), 3, 0);
  const auto h = homogeneous_osjf(K, EnergyPoint{cplx(0.5)}, {1.0, 2.0}, 100.0);
  CHECK(h.trivial);
}

TEST_CASE("auxiliary kernel difference") {
  Interaction in;
  in.kind = InteractionKind::SchrodingerRelCorr;
  in.sigma = SpectralWeight::yukawa(1.0, 1.0);
  const auto K = ChannelKernel::make(in, Channel{3, 1, Sign::plus()});
  const auto d = auxiliary_difference(K, 1.0, 0.7, 1.3);
  CHECK(d.truncated == Approx(d.direct).epsilon(1e-8));
}

TEST_CASE("regulator configuration") {
  RegulatorConfig rc;
  CHECK(rc.ladder().size() == 8);
  CHECK(rc.ladder()[1] == Approx(32.0));
  CHECK(regulator_kind_from_string(to_string(RegulatorKind::Rational)) == RegulatorKind::Rational);
  rc.steps = 1;
  CHECK_THROWS(rc.validate(1.0));
}
