#pragma once
// J-independent momentum-transfer densities of the resolvent, the resolvents
// rebuilt from them, and Froissart-Gribov partial amplitudes.

#include "jost/channels.hpp"
#include "jost/engine.hpp"
#include "jost/kinematics.hpp"
#include "jost/potential.hpp"
#include "jost/quadrature.hpp"

#include <array>
#include <vector>

namespace jost {

//! Continued Born coefficients M^{(1)}, M^{(2)} between momenta x (sheet zx)
//! and y (sheet zy).  Dirac: 1/eta^{zx}(ix) and sigma eta^{zy}(iy);
//! relativistic correction: 1 + (x^2+y^2)/(8m^2) and -xy/(4m^2); local
//! Schroedinger: 1 and 0.
struct BornCoefficients {
  cplx m1, m2;
};
BornCoefficients born_coefficients(InteractionKind kind, double m, Sign zx, Sign zy, cplx x, cplx y);

//! Physical-region coefficients A^{(1)}, A^{(2)}(q, p) of the relativistic
//! correction.
BornCoefficients physical_relcorr_coefficients(double m, cplx q, cplx p);

struct DensityGrid {
  double span = 6.0;      // largest u - rho, absolute
  int nu_order = 8;       // Gauss nodes per nu panel
  double nu_width = 1.0;  // nu panel width cap in units of mu0 (<= 1)
  int tau_panels = 8;
  int tau_order = 8;
  int theta_nodes = 16;   // Gauss-Chebyshev nodes of the alpha^2 average
  int mu_order = 8;       // Gauss nodes per smooth segment of gamma, mu
  int max_order = 0;      // 0: all orders; n: keep terms up to g^n

  void validate() const;
};

//! Density of one resolvent column (sheet zeta at the start rho), stored as
//! the remainder beyond the Born term on a (nu, tau) product grid, with
//! s = u - rho = nu + tau (span - nu).
class DensityTable {
 public:
  double rho = 0;
  EnergyPoint energy{};
  Sign zeta = Sign::plus();
  InteractionKind kind = InteractionKind::SchrodingerLocal;
  double mass = 1;
  SpectralWeight weight;
  DensityGrid grid;
  std::vector<Panel> nu_panels;
  std::vector<Panel> tau_panels;
  int sheets = 1;  // sheet count at the u end
  int parts = 1;   // D^{(1)} only, or D^{(1)}, D^{(2)}
  std::vector<cplx> values;  // [((nu_index * n_tau + tau_index) * sheets + sheet) * parts + part]

  int components() const { return sheets * parts; }
  std::size_t n_nu() const { return nu_panels.size() * grid.nu_order; }
  std::size_t n_tau() const { return tau_panels.size() * grid.tau_order; }
  double nu_start() const { return nu_panels.empty() ? grid.span : nu_panels.front().lo; }
  cplx point(double s) const { return rho + s; }

  //! Remainder (density minus its Born term) at (nu, s); zero below nu_start.
  void remainder(double nu, double s, std::span<cplx> out) const;
  //! Full smooth density (smooth Born part plus remainder); lines excluded.
  void smooth(double nu, double s, std::span<cplx> out) const;
};

DensityTable solve_density(const Interaction& in, double rho, const EnergyPoint& e, Sign zeta,
                           const DensityGrid& grid = {});

//! a^{row, zeta}(rho + s, rho) of channel ch from one density table.
cplx resolvent_from_density(const DensityTable& D, const Channel& ch, double s, int row);

//! Physical-region second-order density of the local Schroedinger system,
//! -int dgamma Sigma int dmu Sigma [ (c - R)(c + R) ]^{-1/2}, c = omega0 + b^2.
//! With continued = true the momenta are q = iu, p = i rho and the square root
//! of Delta(q^2, p^2, -nu^2) takes the e^{i pi} branch.
cplx physical_density_second_order(const SpectralWeight& w, double nu, cplx q, cplx p, cplx b, bool continued);

//! Legendre function of the second kind of complex degree at real Z > 1:
//! int_0^inf (Z + sqrt(Z^2 - 1) cosh t)^{-nu-1} dt.
cplx legendre_q_complex(cplx nu, double Z);

struct FgAmplitude {
  cplx born, second, total;
};
//! T_l(q, p; b^2) = -(1/2p) int dnu Q_l(Z_nu) D(nu; p, q), Z = (q^2+p^2+nu^2)/(2qp),
//! with the local Schroedinger density through order g^2 (order = 1 or 2).
FgAmplitude fg_partial_amplitude(const SpectralWeight& w, cplx l, double q, double p, cplx b, int order = 2);

//! Born partial wave from the Gauss-Legendre projection
//! -(q/2) int_{-1}^{1} P_l(x) <q|V|p>(x) dx of the Yukawa Born amplitude.
double born_projection(const SpectralWeight& w, int l, double q, double p);

struct HalfOffShell {
  cplx from_osjf;  // (k/q)^l [F(iq, -ik) - F(-iq, -ik)] / (2i F(-ik))
  cplx from_fg;    // fg_partial_amplitude through g^2
  cplx unitary;    // e^{i delta} sin(delta) from the phase shift
  double mismatch = 0;          // |from_osjf - from_fg| / |from_osjf|
  double onshell_mismatch = 0;  // |from_osjf - unitary| / |unitary| when q = k
};
HalfOffShell halfoff_consistency(const SpectralWeight& w, int l, double k, double q, const SolverConfig& cfg = {});

}  // namespace jost
