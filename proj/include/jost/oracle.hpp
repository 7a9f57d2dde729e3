#pragma once
// Radial ODE ground truth: Schroedinger and Dirac Jost solutions integrated
// directly in r, Jost values from the Wronskian or the small-r limit.

#include "jost/channels.hpp"
#include "jost/engine.hpp"
#include "jost/kinematics.hpp"
#include "jost/potential.hpp"

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace jost {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OdeConfig {
  double r_min = 1e-6;
  double r_max = 0;  // 0: chosen from mu0
  double r_cap = 600;
  double rtol = 1e-11;
  double atol = 1e-14;
  double wronskian_tol = 1e-7;  // accepted relative spread along the grid

  void validate() const;
  //! Seed radius: r_max if set, else 36 / mu0 capped at r_cap.
  double outer_radius(double mu0) const;
};

enum class SeedKind { Jost, Regular, Irregular };

//! Solution on an increasing radius grid.  Stored values are multiplied by
//! exp(log_scale[i]) to give the true solution at r[i]; the scale keeps
//! exponentially growing solutions representable.
struct RadialSolution {
  SeedKind seed = SeedKind::Jost;
  int components = 1;
  std::vector<double> r;
  std::vector<cplx> values;       // [i * components + c]
  std::vector<cplx> derivatives;  // Schroedinger only, same layout
  std::vector<cplx> log_scale;

  cplx value(std::size_t i, int c = 0) const { return values[i * components + c] * std::exp(log_scale[i]); }
  cplx derivative(std::size_t i) const { return derivatives[i] * std::exp(log_scale[i]); }
};

//! Geometric grid used for Wronskian matching, [lo, hi] with n points.
std::vector<double> match_grid(double lo, double hi, int n);

//! f_l(rho, r) -> chi_l(rho r) at large r, integrated inward.  N = 3.
RadialSolution schrodinger_jost_solution(int l, const SpectralWeight& w, cplx rho, const OdeConfig& cfg,
                                         std::span<const double> grid);
//! phi_l ~ r^{l+1}/(2l+1)!! at the origin, integrated outward at energy k2
//! (complex k2 = -b^2 allowed).
RadialSolution schrodinger_regular_solution(int l, const SpectralWeight& w, cplx k2, const OdeConfig& cfg,
                                            std::span<const double> grid);
//! Solution I with W[I, partner] = 1, seeded at the top of the partner's grid
//! and integrated inward (I dominates at the origin).  The partner is the
//! regular solution, or the recessive one for a singular repulsive potential.
RadialSolution schrodinger_irregular_solution(int l, const std::function<double(double)>& potential, cplx k2,
                                              const RadialSolution& partner, const OdeConfig& cfg);
//! Solution vanishing at the origin for a singular repulsive potential
//! (r^2 V -> +inf), WKB-seeded at r_min and integrated outward.
RadialSolution schrodinger_recessive_solution(int l, const std::function<double(double)>& potential, cplx k2,
                                              const OdeConfig& cfg, std::span<const double> grid);

//! W = f phi' - f' phi, averaged over the common grid.  The spread is taken
//! relative to the larger of |W| and the two products (reported in
//! `magnitude`); throws NumericalError when it exceeds tol.
cplx jost_wronskian(const RadialSolution& f, const RadialSolution& phi, double tol = 1e-7, double* spread = nullptr,
                   double* magnitude = nullptr);

//! F_l(b) = b^l W[f_l(b), phi_l].
JostResult oracle_jost_schrodinger(const SpectralWeight& w, int l, const EnergyPoint& e, const OdeConfig& cfg = {});

struct ContractionSpinor {
  cplx s1, s2;
  static ContractionSpinor make(const Channel& ch, const EnergyPoint& e);
};

//! Two-component (G, F) solution seeded by the free solution X at r_max with
//! eta = eta^{zbar}(ib); vector coupling shifts the energy by -V/2m, scalar
//! coupling shifts the mass by +V/2m.  Recorded on grid.
RadialSolution dirac_jost_solution(const Channel& ch, InteractionKind kind, const SpectralWeight& w,
                                   const EnergyPoint& e, const OdeConfig& cfg, std::span<const double> grid);
//! Small-r limit of sqrt(pi)/Gamma(|kappa|+1/2) (b r/2)^{|kappa|} (S . J) on the
//! radius ladder of sol (>= 6 radii), extrapolated polynomially in r from the
//! inner and the outer four radii; throws NumericalError when they disagree.
cplx dirac_jost_extract(const RadialSolution& sol, const Channel& ch, const EnergyPoint& e, double* spread = nullptr);

JostResult oracle_jost_dirac(const Channel& ch, InteractionKind kind, const SpectralWeight& w, const EnergyPoint& e,
                             const OdeConfig& cfg = {});

//! Dispatch on the interaction kind (Schroedinger local or Dirac, N = 3).
JostResult oracle_jost(const Interaction& in, const Channel& ch, const EnergyPoint& e, const OdeConfig& cfg = {});

//! Roots of a real function of b on [lo, hi]: scan for sign changes and refine.
std::vector<double> bound_states(const std::function<double(double)>& jost_scan, double lo, double hi,
                                 double tol = 1e-12, int scan_points = 400);

//! Number of nodes of phi_l at zero energy on (0, r_max): the bound-state count.
int zero_energy_nodes(const SpectralWeight& w, int l, const OdeConfig& cfg = {});

//! Variable-phase phase shift for l in {0, 1}.
double variable_phase(const SpectralWeight& w, int l, double k, const OdeConfig& cfg = {});

}  // namespace jost
