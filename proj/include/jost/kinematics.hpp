#pragma once
// Continued kinematics: energy points, relativistic sheet functions and the
// nested momentum-transfer bounds.

#include "jost/channels.hpp"
#include "jost/specfun.hpp"

namespace jost {

//! w^zeta(i rho) = zeta sqrt(m^2 - rho^2); for real rho > m this is
//! i zeta sqrt(rho^2 - m^2).
cplx sheet_energy(Sign zeta, cplx rho, double m);

//! eta^zeta(i rho) = (w^zeta(i rho) - m) / (i rho).
cplx eta(Sign zeta, cplx rho, double m);

//! A point on the energy surface: b with W = w^zbar(ib).  For Schroedinger
//! problems only b matters; b = -ik is the outgoing on-shell point.
struct EnergyPoint {
  cplx b{1.0, 0.0};
  Sign zbar = Sign::plus();
  double m = 1.0;

  static EnergyPoint from_k(double k, Sign zbar = Sign::plus(), double m = 1.0) { return {cplx(0.0, -k), zbar, m}; }
  cplx W() const { return sheet_energy(zbar, b, m); }
  //! True when b lies on the cut [m, inf) where w needs the explicit branch.
  bool on_cut() const { return b.imag() == 0.0 && b.real() >= m; }
};

//! g^{zeta'}(u; b) = 1 / (2 w'(W - w')), w' = w^{zeta'}(iu).
cplx sheet_propagator(Sign zeta_p, cplx u, const EnergyPoint& e);

//! N^zeta_xi(rho, b): 1 for xi = +1, (W + m) / (w^zeta(i rho) + m) for xi = -1.
cplx sheet_norm(Sign zeta, Sign xi, cplx rho, const EnergyPoint& e);

//! Index of a sheet label in 2-vectors: +1 -> 0, -1 -> 1.
inline int sheet_index(Sign z) { return z.value() > 0 ? 0 : 1; }
inline Sign sheet_of(int i) { return i == 0 ? Sign::plus() : Sign::minus(); }

//! alpha^2 bounds of the nested integral for fixed (nu; mu, gamma; u, rho).
struct LambdaBounds {
  double lo = 0, hi = 0;
  double mid() const { return 0.5 * (lo + hi); }
  double half() const { return 0.5 * (hi - lo); }
};
LambdaBounds lambda_bounds(double nu, double mu, double gamma, double u, double rho);

}  // namespace jost
