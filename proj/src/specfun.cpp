#include "jost/specfun.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace jost {

namespace {

constexpr double pi = std::numbers::pi;

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

// Upward three-term recurrence, valid for complex argument.
template <class T>
T gegenbauer_rec(double lambda, int l, T z) {
  if (l < 0) return T(0);
  T prev(1);
  if (l == 0) return prev;
  T cur = T(2.0 * lambda) * z;
  for (int n = 1; n < l; ++n) {
    T next = (T(2.0 * (n + lambda)) * z * cur - T(n + 2.0 * lambda - 1.0) * prev) / T(n + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

struct GslHandlerGuard {
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  ~GslHandlerGuard() { gsl_set_error_handler(old); }
};

}  // namespace

void EvalConfig::validate() const {
  if (!(rel_tol > 0)) throw DomainError("EvalConfig: rel_tol must be positive");
  if (max_terms < 8) throw DomainError("EvalConfig: max_terms must be >= 8");
  if (quad_panels < 1) throw DomainError("EvalConfig: quad_panels must be >= 1");
}

double chi(double l, double x) {
  if (!(x > 0)) throw DomainError("chi: argument must be positive");
  if (l < -1.0) throw DomainError("chi: degree below -1");
  if (is_integer(l)) {
    const double v = std::real(chi(static_cast<int>(std::lround(l)), cplx(x, 0.0)));
    if (!std::isfinite(v)) throw std::overflow_error("chi: overflow near the origin");
    return v;
  }
  const double v = std::sqrt(2.0 * x / pi) * std::cyl_bessel_k(std::abs(l + 0.5), x);
  if (!std::isfinite(v)) throw std::overflow_error("chi: overflow near the origin");
  return v;
}

cplx chi(int l, cplx z) {
  if (l < -1) throw DomainError("chi: degree below -1");
  if (l == -1) l = 0;  // K_{-1/2} = K_{1/2}
  // exp(-z) sum_k (l+k)! / (k! (l-k)!) (2z)^{-k}
  cplx sum(1.0), term(1.0);
  const cplx inv2z = 1.0 / (2.0 * z);
  for (int k = 1; k <= l; ++k) {
    term *= double((l + k) * (l - k + 1)) / double(k) * inv2z;
    sum += term;
  }
  return std::exp(-z) * sum;
}

cplx chi_prime(int l, cplx z) {
  if (l <= 0) return -chi(0, z);
  return -chi(l - 1, z) - double(l) / z * chi(l, z);
}

double riccati_bessel(double j, double x) {
  if (x < 0) throw DomainError("riccati_bessel: negative argument");
  if (x == 0) return 0.0;
  return std::sqrt(pi * x / 2.0) * std::cyl_bessel_j(j + 0.5, x);
}

double legendre_s(double j, double a, double Z, const EvalConfig& cfg) {
  cfg.validate();
  if (!(Z > 1.0)) throw DomainError("legendre_s: Z must exceed 1 (cut)");
  const double lr = j + a;
  if (!is_integer(lr) || lr < -1e-12) throw DomainError("legendre_s: j + a must be a nonnegative integer");
  if (!(j > -1.0)) throw DomainError("legendre_s: j must exceed -1");
  const int l = static_cast<int>(std::lround(lr));
  if (a == 0.0) return legendre_q(l, Z);

  GslHandlerGuard guard;
  struct Params { double Z; int p; } prm{Z, l + 1};
  gsl_function f;
  f.function = [](double t, void* v) {
    auto* q = static_cast<Params*>(v);
    return std::pow(q->Z - t, -q->p);
  };
  f.params = &prm;
  const std::size_t limit = 1000;
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
      gsl_integration_workspace_alloc(limit), gsl_integration_workspace_free);
  std::unique_ptr<gsl_integration_qaws_table, decltype(&gsl_integration_qaws_table_free)> tab(
      gsl_integration_qaws_table_alloc(j, j, 0, 0), gsl_integration_qaws_table_free);
  double result = 0, err = 0;
  const int status = gsl_integration_qaws(&f, -1.0, 1.0, tab.get(), 0.0, cfg.rel_tol, limit, ws.get(),
                                          &result, &err);
  if (status != GSL_SUCCESS && std::abs(err) > 1e3 * cfg.rel_tol * std::abs(result))
    throw std::runtime_error("legendre_s: quadrature did not converge");
  // l! / (2^{j+1} Gamma(j+1))
  const double pref = std::exp(std::lgamma(l + 1.0) - (j + 1.0) * std::log(2.0) - std::lgamma(j + 1.0));
  return pref * result;
}

cplx legendre_p(int l, cplx T) {
  if (l < 0) l = -l - 1;
  return gegenbauer_rec(0.5, l, T);
}

cplx legendre_p(cplx nu, cplx T) {
  if (std::imag(nu) == 0.0 && is_integer(std::real(nu)))
    return legendre_p(static_cast<int>(std::lround(std::real(nu))), T);
  if (!(std::real(T) > 0)) throw DomainError("legendre_p: Laplace integral needs Re T > 0");
  // P_nu(T) = (1/pi) int_0^pi (T + sqrt(T^2-1) cos th)^nu dth; periodic smooth
  // integrand, so the trapezoid rule on the doubled interval converges fast.
  const cplx s = std::sqrt(T * T - 1.0);
  auto eval = [&](int n) {
    cplx acc(0);
    for (int k = 0; k < n; ++k) {
      const double th = pi * (k + 0.5) / n;
      acc += std::pow(T + s * std::cos(th), nu);
    }
    return acc / double(n);
  };
  int n = 64;
  cplx prev = eval(n);
  for (int it = 0; it < 8; ++it) {
    n *= 2;
    const cplx cur = eval(n);
    if (std::abs(cur - prev) <= 1e-14 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

double legendre_q(int l, double Z) {
  if (!(Z > 1.0)) throw DomainError("legendre_q: Z must exceed 1");
  if (l < 0) throw DomainError("legendre_q: negative degree");
  const double q0 = 0.5 * std::log((Z + 1.0) / (Z - 1.0));
  if (l == 0) return q0;
  const double q1 = Z * q0 - 1.0;
  if (l == 1) return q1;
  // Upward recurrence loses about log10((Z + sqrt(Z^2-1))^{2l}) digits.
  const double growth = 2.0 * l * std::log10(Z + std::sqrt(Z * Z - 1.0));
  if (growth < 4.0) {
    double qm = q0, qc = q1;
    for (int n = 1; n < l; ++n) {
      const double qn = ((2.0 * n + 1.0) * Z * qc - n * qm) / (n + 1.0);
      qm = qc;
      qc = qn;
    }
    return qc;
  }
  // Q_l is the minimal solution: Miller's backward recurrence normalized by Q_0.
  const double decay = std::log10(Z + std::sqrt(Z * Z - 1.0));
  const int top = l + static_cast<int>(std::ceil(20.0 / decay)) + 2;
  double qn1 = 0.0, qn = 1e-280, ql = 0.0;
  for (int n = top; n >= 1; --n) {
    const double qm = ((2.0 * n + 1.0) * Z * qn - (n + 1.0) * qn1) / n;
    qn1 = qn;
    qn = qm;
    if (n - 1 == l) ql = qn;
    if (std::abs(qn) > 1e250) {
      qn *= 1e-250;
      qn1 *= 1e-250;
      ql *= 1e-250;
    }
  }
  return ql * q0 / qn;
}

cplx kernel_weight_p(double j, double a, cplx T) {
  const double lr = j + a;
  if (!is_integer(lr) || lr < -1e-12) throw DomainError("kernel_weight_p: j + a must be a nonnegative integer");
  const int l = static_cast<int>(std::lround(lr));
  const double lambda = 0.5 - a;
  if (lambda < -1e-12) throw DomainError("kernel_weight_p: order above 1/2 unsupported");
  if (std::abs(a) < 1e-14) return legendre_p(l, T);
  const cplx t2m1 = T * T - 1.0;
  if (lambda < 1e-12) {
    // N = 2: P^{1/2}_{l-1/2}(T) (T^2-1)^{-1/4} = sqrt(2/pi) T_l(T) / sqrt(T^2-1)
    cplx t0(1.0), t1 = T;
    cplx tl = (l == 0) ? t0 : t1;
    for (int n = 1; n < l; ++n) {
      tl = 2.0 * T * t1 - t0;
      t0 = t1;
      t1 = tl;
    }
    return std::sqrt(2.0 / pi) * tl / std::sqrt(t2m1);
  }
  // P^a_j(T) = c C^lambda_l(T) (T^2-1)^{-a/2},
  // c = 2^{lambda-1/2} Gamma(lambda) l! / (sqrt(pi) Gamma(l + 2 lambda)).
  const double c = std::exp((lambda - 0.5) * std::log(2.0) + std::lgamma(lambda) + std::lgamma(l + 1.0) -
                            0.5 * std::log(pi) - std::lgamma(l + 2.0 * lambda));
  const cplx g = gegenbauer_rec(lambda, l, T);
  if (is_integer(a)) {
    const int ia = static_cast<int>(std::lround(a));
    cplx p(1.0);
    for (int k = 0; k < std::abs(ia); ++k) p *= t2m1;
    return ia < 0 ? c * g * p : c * g / p;
  }
  return c * g * std::pow(t2m1, -a);
}

double gegenbauer(double lambda, int l, double z) {
  if (!(lambda > 0)) throw DomainError("gegenbauer: lambda must be positive");
  if (l < -1) throw DomainError("gegenbauer: index below -1");
  return gegenbauer_rec(lambda, l, z);
}

double sphere_area(int N) {
  if (N < 1) throw DomainError("sphere_area: dimension must be positive");
  return 2.0 * std::pow(pi, 0.5 * N) / std::tgamma(0.5 * N);
}

}  // namespace jost
