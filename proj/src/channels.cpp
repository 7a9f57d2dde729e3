#include "jost/channels.hpp"

#include "jost/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jost {

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;  // exact at each step
  return r;
}

// J - lambda as an integer, or -1 if it is not a nonnegative integer.
long offset_from_lambda(int N, int twoJ) {
  const int twoLam = N - 2;
  const int d = twoJ - twoLam;
  if (d < 0 || d % 2 != 0) return -1;
  return d / 2;
}

}  // namespace

int Channel::l() const { return static_cast<int>(std::lround(L() + a())); }
int Channel::l_partner() const { return static_cast<int>(std::lround(L_partner() + a())); }

std::uint64_t Channel::degeneracy() const { return jost::degeneracy(N, J()); }

std::string Channel::id() const {
  std::ostringstream os;
  os << "N" << N << ":J" << twoJ << "/2:xi" << (xi.value() > 0 ? '+' : '-');
  return os.str();
}

Channel make_channel(int N, double J, Sign xi) {
  if (N < 2) throw InvalidChannel("dimension must be at least 2");
  const double twoJd = 2.0 * J;
  if (std::abs(twoJd - std::round(twoJd)) > 1e-12) throw InvalidChannel("J must be a multiple of 1/2");
  Channel ch{N, static_cast<int>(std::lround(twoJd)), xi};
  if (offset_from_lambda(N, ch.twoJ) < 0) throw InvalidChannel("J - lambda_N must be a nonnegative integer");
  if (ch.l() < 0) throw InvalidChannel("orbital label l is negative for this (J, xi)");
  return ch;
}

std::uint64_t degeneracy(int N, double J) {
  if (N < 2) throw DomainError("degeneracy: dimension must be at least 2");
  const double twoJd = 2.0 * J;
  if (std::abs(twoJd - std::round(twoJd)) > 1e-12) throw DomainError("degeneracy: J must be a multiple of 1/2");
  const long n = offset_from_lambda(N, static_cast<int>(std::lround(twoJd)));
  if (n < 0) throw DomainError("degeneracy: J - lambda_N must be a nonnegative integer");
  // (J+lambda)! / ((J-lambda)! (N-2)!) = binom(n + N - 2, N - 2)
  const std::uint64_t pow2 = std::uint64_t(1) << ((N - 1) / 2);
  return pow2 * binomial(static_cast<std::uint64_t>(n + N - 2), static_cast<std::uint64_t>(N - 2));
}

ProjectorCoefficients projector_coefficients(const Channel& ch, double t) {
  const double omega = sphere_area(ch.N);
  const double lam1 = ch.lambda() + 1.0;
  const double xi = ch.xi.real();
  ProjectorCoefficients c;
  c.spin = xi / omega * gegenbauer(lam1, ch.l() - 1, t);
  c.scalar = -xi / omega * gegenbauer(lam1, ch.l_partner() - 1, t);
  return c;
}

Mat2 projector_matrix(const Channel& ch, const std::array<double, 3>& tau, const std::array<double, 3>& v) {
  if (ch.N != 3) throw InvalidChannel("explicit projector matrices exist for N = 3 only");
  using C = std::complex<double>;
  const C I(0, 1);
  auto sig = [&](const std::array<double, 3>& n) {
    return Mat2{C(n[2]), C(n[0]) - I * n[1], C(n[0]) + I * n[1], C(-n[2])};
  };
  auto mul = [](const Mat2& A, const Mat2& B) {
    return Mat2{A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3], A[2] * B[0] + A[3] * B[2],
                A[2] * B[1] + A[3] * B[3]};
  };
  const double t = tau[0] * v[0] + tau[1] * v[1] + tau[2] * v[2];
  const ProjectorCoefficients c = projector_coefficients(ch, std::clamp(t, -1.0, 1.0));
  Mat2 m = mul(sig(tau), sig(v));
  for (auto& e : m) e *= c.spin;
  m[0] += c.scalar;
  m[3] += c.scalar;
  return m;
}

}  // namespace jost
