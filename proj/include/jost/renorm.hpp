#pragma once
// Jost objects for singular and nonlocal interactions: partial potentials of
// the relativistic correction, the cutoff-subtracted OSJF and the homogeneous
// equation of singular repulsive kernels.

#include "jost/engine.hpp"
#include "jost/oracle.hpp"

#include <stdexcept>
#include <vector>

namespace jost {

struct RenormalizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! U_kappa(r) of the relativistic correction without the delta(r) contact term.
double partial_potential_relcorr(const SpectralWeight& w, const Channel& ch, double m, double r);
//! Coefficient c of the excluded contact term c delta(r) / r^2: -I_0 / (2 (2m)^2).
double relcorr_contact_coefficient(const SpectralWeight& w, double m);

struct ConvergenceReport {
  bool ok = false;
  double I0 = 0, I1 = 0;
};
//! Iteration-series conditions on the second nonlocal weight: I_0 = 0 and
//! finite I_1 (|I_0| <= tol max(1, sum |g|)).
ConvergenceReport convergence_conditions(const SpectralWeight& w2, double tol = 1e-12);

//! Rank-one large-u form K(u, rho) ~ U(u) R(rho) with power-law factors
//! U = cu u^pu, R = cr rho^pr, fitted on a sampled block of the kernel.
struct KernelAsymptotics {
  double cu = 0, pu = 0, cr = 0, pr = 0;
  double residual = 0;  // relative Frobenius residual of the rank-one fit
  double x0 = 0;        // lower end of the exponent integral

  double U(double u) const { return cu * std::pow(u, pu); }
  double R(double rho) const { return cr * std::pow(rho, pr); }
  //! True when O(u) diverges (exponent of K on the diagonal >= 1, positive).
  bool singular() const { return pu + pr >= 1.0 - 1e-9 && cu * cr > 0; }
  //! O(x; b^2) = int_{x0}^{x} U(a) R(a) / (a^2 - b^2) da.
  cplx exponent(double x, cplx b2) const;
};
KernelAsymptotics fit_asymptotics(const ChannelKernel& K, double u_lo, double u_hi, double rho_lo, double rho_hi,
                                  int samples = 12);

enum class RegulatorKind {
  Unit,         // M = 1 with the u-integral cut at Lambda (regular kernels)
  Rational,     // M = Lambda^2 / (Lambda^2 + x^2)
  Exponential,  // M = (1/Lambda) exp(-exp(O(x)) / Lambda)
};
std::string to_string(RegulatorKind k);
RegulatorKind regulator_kind_from_string(const std::string& s);

struct RegulatorConfig {
  RegulatorKind kind = RegulatorKind::Unit;
  double lambda1 = 16;  // first cutoff, absolute
  int steps = 8;        // ladder Lambda_j = lambda1 2^j, j < steps
  int order = 0;        // extrapolation points used (0: all)
  double power = 0;     // error expansion in Lambda^{-power}; 0: kind default
  //! Normalize every ladder member by its value at this start point (the
  //! homogeneous solution is defined up to a constant); 0: off.
  double reference = 0;
  SolverConfig solver{};

  void validate(double mu0) const;
  std::vector<double> ladder() const;
  double expansion_power() const;
};

struct RenormalizedResult {
  cplx value{};
  double spread = 0;            // |last two extrapolants|
  std::vector<cplx> members;    // F^Lambda per cutoff
  cplx regulator_at_rho{};      // M^Lambda(rho^2) at the largest cutoff
};

//! Cutoff-subtracted OSJF: M(rho^2) + int du a(u, rho)/(u^2 - b^2) (rho/u)^l M(u^2)
//! on the Lambda ladder, extrapolated in 1/Lambda^p.  Schroedinger-form kernels.
RenormalizedResult renormalized_osjf(const ChannelKernel& K, const EnergyPoint& e, cplx rho,
                                     const RegulatorConfig& reg);

struct HomogeneousResult {
  bool trivial = false;            // bounded kernel: only the zero solution
  std::vector<double> rho;
  std::vector<double> values;      // a(U, rho_j) / A(U)
  std::vector<double> ratios;      // values / values[0]
  std::vector<double> condition;   // |K(u, rho_0) / A(u)| along the u ladder
  double spread = 0;               // max relative change of ratios, U/2 -> U
  KernelAsymptotics asymptotics;
};
//! Nontrivial solution of T(rho) = int du K(u, rho)/(u^2 - b^2) T(u) from the
//! large-u limit of the resolvent, for real b and rho.
HomogeneousResult homogeneous_osjf(const ChannelKernel& K, const EnergyPoint& e, std::vector<double> rho,
                                   double u_max, const SolverConfig& cfg = {});

//! T(rho) up to normalization from the ODE: (rho^2 - b^2) int phi chi_l(rho r) dr
//! with phi the recessive solution at k^2 = -b^2.  Real b, rho > b.
std::vector<double> oracle_homogeneous(const SpectralWeight& w, int l, double b, const std::vector<double>& rho,
                                       const OdeConfig& cfg = {});

struct DifferenceCheck {
  double direct = 0;      // (k^2 - s^2) int K / ((a^2 + s^2)(a^2 + k^2)) (rho/a)^l
  double truncated = 0;   // H_Lambda(rho, s) - H_Lambda(rho, k), extrapolated
  double spread = 0;
};
//! Difference of the (individually divergent) auxiliary kernels at two
//! imaginary momenta k and s.
DifferenceCheck auxiliary_difference(const ChannelKernel& K, double rho, double s, double k);

}  // namespace jost
