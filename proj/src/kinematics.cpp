#include "jost/kinematics.hpp"

#include <cmath>

namespace jost {

cplx sheet_energy(Sign zeta, cplx rho, double m) {
  // sqrt(m - rho) sqrt(m + rho) gives +i sqrt(rho^2 - m^2) on the real cut,
  // which is the conventional branch.
  return zeta.real() * std::sqrt(cplx(m) - rho) * std::sqrt(cplx(m) + rho);
}

cplx eta(Sign zeta, cplx rho, double m) {
  const cplx I(0.0, 1.0);
  if (std::abs(rho) < 1e-6 * m && zeta.value() > 0) {
    // removable: (w - m)/(i rho) = i rho / (w + m) on the + sheet
    return I * rho / (sheet_energy(zeta, rho, m) + m);
  }
  return (sheet_energy(zeta, rho, m) - m) / (I * rho);
}

cplx sheet_propagator(Sign zeta_p, cplx u, const EnergyPoint& e) {
  const cplx w = sheet_energy(zeta_p, u, e.m);
  return 1.0 / (2.0 * w * (e.W() - w));
}

cplx sheet_norm(Sign zeta, Sign xi, cplx rho, const EnergyPoint& e) {
  if (xi.value() > 0) return 1.0;
  return (e.W() + e.m) / (sheet_energy(zeta, rho, e.m) + e.m);
}

LambdaBounds lambda_bounds(double nu, double mu, double gamma, double u, double rho) {
  const double n2 = nu * nu, m2 = mu * mu, g2 = gamma * gamma, u2 = u * u, r2 = rho * rho;
  const double mid = (n2 * (m2 + g2 - n2) + u2 * (n2 + m2 - g2) + r2 * (n2 - m2 + g2)) / (2.0 * n2);
  const double d1 = std::max(0.0, triangle(n2, m2, g2));
  const double d2 = std::max(0.0, triangle(u2, r2, n2));
  const double half = std::sqrt(d1 * d2) / (2.0 * n2);
  return {mid - half, mid + half};
}

}  // namespace jost
