#include "jost/oracle.hpp"
#include "jost/specfun.hpp"

#include <doctest.h>

#include <cmath>

using namespace jost;
using doctest::Approx;

TEST_CASE("free Jost solution is the Riccati function") {
  const auto grid = match_grid(0.5, 4.0, 6);
  const auto f = schrodinger_jost_solution(1, SpectralWeight{}, 1.0, OdeConfig{}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(f.value(i) - chi(1, cplx(grid[i]))) < 1e-9);
}

TEST_CASE("free regular solution") {
  const auto grid = match_grid(0.5, 4.0, 6);
  const double k = 1.3;
  const auto phi = schrodinger_regular_solution(0, SpectralWeight{}, k * k, OdeConfig{}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(phi.value(i) - std::sin(k * grid[i]) / k) < 1e-9);
  const auto small = match_grid(1e-3, 2e-3, 3);
  const auto p1 = schrodinger_regular_solution(1, SpectralWeight{}, 0.0, OdeConfig{}, small);
  CHECK(p1.value(0).real() == Approx(1e-6 / 3).epsilon(1e-6));
}

TEST_CASE("free Jost value is one") {
  const auto r = oracle_jost_schrodinger(SpectralWeight{}, 0, EnergyPoint::from_k(0.7));
  CHECK(std::abs(r.value - 1.0) < 1e-9);
}

TEST_CASE("irregular solution has unit Wronskian with the regular one") {
  const SpectralWeight w = SpectralWeight::yukawa(-0.8, 1.0);
  const auto grid = match_grid(0.2, 3.0, 8);
  const auto V = [&](double r) { return evaluate_potential(w, 3, r); };
  const auto phi = schrodinger_regular_solution(0, w, 0.5, OdeConfig{}, grid);
  const auto I = schrodinger_irregular_solution(0, V, 0.5, phi, OdeConfig{});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx W = I.value(i) * phi.derivative(i) - I.derivative(i) * phi.value(i);
    CHECK(std::abs(W - 1.0) < 1e-8);
  }
}

TEST_CASE("Dirac free extraction is one") {
  const Channel ch{3, 1, Sign::plus()};
  const auto r = oracle_jost_dirac(ch, InteractionKind::DiracVector, SpectralWeight{}, EnergyPoint{cplx(0.5)});
  CHECK(std::abs(r.value - 1.0) < 1e-6);
}

TEST_CASE("bound-state root finder") {
  const auto roots = bound_states([](double x) { return std::cos(x); }, 0.0, 5.0, 1e-13, 50);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == Approx(M_PI / 2).epsilon(1e-12));
  CHECK(roots[1] == Approx(3 * M_PI / 2).epsilon(1e-12));
  CHECK(zero_energy_nodes(SpectralWeight::yukawa(0.5, 1.0), 0) == 0);
}

TEST_CASE("variable phase agrees with the Jost phase") {
  const SpectralWeight w = SpectralWeight::yukawa(-0.5, 1.0);
  const double k = 1.0;
  const auto Fm = oracle_jost_schrodinger(w, 0, EnergyPoint::from_k(k));
  const auto Fp = oracle_jost_schrodinger(w, 0, EnergyPoint{cplx(0, k)});
  CHECK(variable_phase(w, 0, k) == Approx(phase_shift(Fp.value, Fm.value)).epsilon(1e-7));
}
