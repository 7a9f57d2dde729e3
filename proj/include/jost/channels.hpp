#pragma once
// SO(N) partial-wave bookkeeping for the Dirac and Schroedinger channels.

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace jost {

//! A +1/-1 label (spin-orbit sign xi, energy sheet zeta).
class Sign {
 public:
  constexpr Sign() = default;
  constexpr explicit Sign(int v) : v_(v) {
    if (v != 1 && v != -1) throw std::invalid_argument("Sign must be +1 or -1");
  }
  constexpr int value() const { return v_; }
  constexpr double real() const { return v_; }
  constexpr Sign operator-() const { return Sign(-v_); }
  constexpr bool operator==(const Sign&) const = default;
  static constexpr Sign plus() { return Sign(1); }
  static constexpr Sign minus() { return Sign(-1); }

 private:
  int v_ = 1;
};

struct InvalidChannel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Channel {
  int N = 3;
  int twoJ = 1;  // 2J
  Sign xi;

  double J() const { return 0.5 * twoJ; }
  double a() const { return 0.5 * (3 - N); }
  double lambda() const { return 0.5 * N - 1.0; }
  double kappa() const { return xi.real() * (J() + 0.5); }
  //! L_xi = J + xi/2 and its partner L_{-xi} = J - xi/2.
  double L() const { return J() + 0.5 * xi.real(); }
  double L_partner() const { return J() - 0.5 * xi.real(); }
  //! Integer orbital labels l_xi = L_xi + a and l_{-xi}.
  int l() const;
  int l_partner() const;
  std::uint64_t degeneracy() const;
  std::string id() const;
};

Channel make_channel(int N, double J, Sign xi);

//! 2^{[(N-1)/2]} (J+lambda)! / ((J-lambda)! (N-2)!), exact.
std::uint64_t degeneracy(int N, double J);

struct ProjectorCoefficients {
  double scalar = 0;  // multiplies the identity
  double spin = 0;    // multiplies (sigma.tau)(sigma.v)
};

//! Gegenbauer coefficients of the channel projector at cosine t.
ProjectorCoefficients projector_coefficients(const Channel& ch, double t);

//! Explicit 2x2 projector for N = 3 with Pauli matrices, row-major.
using Mat2 = std::array<std::complex<double>, 4>;
Mat2 projector_matrix(const Channel& ch, const std::array<double, 3>& tau, const std::array<double, 3>& v);

}  // namespace jost
