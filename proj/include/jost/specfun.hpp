#pragma once
// Classical special functions used by the kernels, the potentials and the
// free radial solutions.

#include <complex>
#include <stdexcept>

namespace jost {

using cplx = std::complex<double>;

struct EvalConfig {
  double rel_tol = 1e-12;
  int max_terms = 400;
  int quad_panels = 8;

  void validate() const;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

//! chi_l(x) = sqrt(2x/pi) K_{l+1/2}(x); chi_0 = exp(-x).  l >= -1.
double chi(double l, double x);

//! Closed form for integer l >= -1, valid for complex argument with Re z > 0
//! or on the imaginary axis (outgoing waves).
cplx chi(int l, cplx z);
//! d/dz chi_l(z) = -chi_{l-1}(z) - (l/z) chi_l(z).
cplx chi_prime(int l, cplx z);

//! Riccati-Bessel psi_j(x) = sqrt(pi x / 2) J_{j+1/2}(x).
double riccati_bessel(double j, double x);

//! S^a_j(Z) = e^{-i pi a} Q^a_j(Z) / (Z^2-1)^{a/2}, j = l - a, from the
//! integral of (1-t^2)^j / (Z-t)^{l+1} over [-1, 1].
double legendre_s(double j, double a, double Z, const EvalConfig& cfg = {});

//! Legendre P_l for integer degree, any complex argument.
cplx legendre_p(int l, cplx T);
//! Legendre function of complex degree at Re T > 0 (Laplace integral).
cplx legendre_p(cplx nu, cplx T);
//! Legendre Q_l for integer degree at real Z > 1 (closed form + recurrence,
//! backward for large l).
double legendre_q(int l, double Z);

//! Kernel weight P^a_j(T) (T^2-1)^{-a/2}.  Multiplied by (2 u rho)^{-a} it
//! gives P^a_j(T) / Delta(u^2, rho^2, nu^2)^{a/2}.  j = l - a with integer
//! l >= 0; a = (3 - N)/2.  Polynomial in T for odd N.
cplx kernel_weight_p(double j, double a, cplx T);

//! Gegenbauer C^lambda_l(z), lambda > 0.  Index l = -1 is the zero polynomial.
double gegenbauer(double lambda, int l, double z);

//! Delta(A, B, C) = (A + B - C)^2 - 4AB.
template <class T>
constexpr T triangle(T A, T B, T C) {
  const T s = A + B - C;
  return s * s - T(4) * A * B;
}

//! Half-angle cosine T(u rho | nu) = (u^2 + rho^2 - nu^2) / (2 u rho).
template <class T>
constexpr T cosine(T u, T rho, T nu) {
  return (u * u + rho * rho - nu * nu) / (T(2) * u * rho);
}

//! Omega_N = 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int N);

}  // namespace jost
