#pragma once
// Volterra kernels, resolvent rays, off-shell and on-shell Jost functions and
// the quantities assembled from them.

#include "jost/channels.hpp"
#include "jost/kinematics.hpp"
#include "jost/potential.hpp"
#include "jost/quadrature.hpp"

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace jost {

struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! K_j(u, rho) for one weight: Legendre-weighted momentum-transfer integral
//! over [mu0, u - rho].  j = l - a_N.  Zero below threshold.
double kernel_schrodinger(const SpectralWeight& w, double j, int N, double u, double rho);

//! 2x2 Dirac kernel entry K^{zp z}(u, rho) for vector or scalar coupling.
cplx kernel_dirac(const SpectralWeight& w, const Channel& ch, InteractionKind kind, double m, Sign zp, Sign z, double u,
                  double rho);

//! Relativistic-correction kernel (N = 3) from the continued Born
//! coefficients A1 = 1 + (u^2 + rho^2)/(2 (2m)^2), A2 = -u rho / (2m)^2.
double kernel_relcorr(const SpectralWeight& w, const Channel& ch, double m, double u, double rho);

struct SolverConfig {
  int order = 16;              // Gauss nodes per panel
  int error_order = 12;        // second run for the error estimate
  bool estimate_error = true;
  double width = 0.5;          // panel width cap in units of mu0
  double geometric_from = 24;  // in units of mu0
  double ratio = 1.3;
  double s_max = 1e4;          // upper end of the ray (absolute)
  double guard = 1e-6;         // minimal |propagator denominator| / m
  int max_breaks = 4000;
  std::vector<double> extra_breaks;  // absolute ray coordinates
  double fault = 0.0;                // kernel perturbation for negative controls

  void validate() const;
};

enum class Direction { Up, Down };

//! One partial wave of an interaction, reduced to kernel blocks over sheets.
class ChannelKernel {
 public:
  static ChannelKernel schrodinger(const SpectralWeight& w, int N, int l);
  //! Any interaction kind in channel ch.  Schroedinger kinds use l = l_xi.
  static ChannelKernel make(const Interaction& in, const Channel& ch);

  int dim() const { return dirac_ ? 2 : 1; }
  bool is_dirac() const { return dirac_; }
  InteractionKind kind() const { return kind_; }
  const Channel& channel() const { return ch_; }
  double exponent() const { return exponent_; }
  double mu0() const { return mu0_; }
  double mass() const { return m_; }
  std::size_t components() const { return comps_.size(); }
  double delay(std::size_t c) const { return comps_[c].delay; }

  //! Component block K_c(u, alpha), row-major dim x dim, zero below delay.
  void block(std::size_t c, cplx u, cplx alpha, std::span<cplx> out) const;
  //! Sum over components.
  void full_block(cplx u, cplx alpha, std::span<cplx> out) const;
  //! Propagator per sheet at alpha: g^{zeta'}(alpha; b), or 1/(alpha^2 - b^2).
  void propagator(cplx alpha, const EnergyPoint& e, std::span<cplx> out) const;
  //! N^{zeta'}_xi(u, b) per sheet (1 for Schroedinger).
  void norm(cplx u, const EnergyPoint& e, std::span<cplx> out) const;
  //! Breakpoints (sums of delays and smooth knots) up to limit.
  std::vector<double> breakpoints(double limit, int max_count) const;

  ChannelKernel perturbed(double eps) const;

 private:
  struct Component {
    bool line = true;
    int weight = 0;  // 0: sigma, 1: sigma2 (nonlocal)
    double g = 0, mu = 0;
    double delay = 0;
  };
  void base(const Component& c, cplx u, cplx alpha, cplx& k1, cplx& k2) const;
  void add_weight(const SpectralWeight& w, int which);

  bool dirac_ = false;
  InteractionKind kind_ = InteractionKind::SchrodingerLocal;
  Channel ch_{};
  int N_ = 3;
  double j1_ = 0, j2_ = 0;  // degrees of the two scalar kernels
  double exponent_ = 0;
  double m_ = 1;
  double sigma_sign_ = 1;
  double mu0_ = 0;
  double fault_ = 0;
  SpectralWeight w_[2];
  std::vector<Component> comps_;
};

//! Resolvent along a ray rho + s (Up) or rho - s (Down) with one fixed
//! sheet index at the rho end.
class RaySolution {
 public:
  cplx start{};
  Direction dir = Direction::Up;
  int fixed = 0;
  int dim = 1;
  int order = 16;
  std::vector<Panel> panels;
  std::vector<cplx> values;  // [(panel * order + node) * dim + i]

  double origin() const { return panels.empty() ? 0.0 : panels.front().lo; }
  double end() const { return panels.empty() ? 0.0 : panels.back().hi; }
  cplx point(double s) const { return dir == Direction::Up ? start + s : start - s; }
  cplx at(std::size_t panel, int node, int i) const { return values[(panel * order + node) * dim + i]; }
  //! Interpolated value (zero below the origin).
  void eval(double s, std::span<cplx> out) const;
};

RaySolution solve_ray(const ChannelKernel& K, const EnergyPoint& e, cplx rho, int fixed, Direction dir,
                      const SolverConfig& cfg, std::optional<double> s_end = std::nullopt, int order = 0);

//! Both sheet columns of a(u, rho; b^2) for fixed rho.
struct ResolventTable {
  cplx rho{};
  std::vector<RaySolution> columns;  // one per sheet at rho
  //! a^{row col}(u, rho) at u = rho + s.
  cplx value(double s, int row, int col) const;
};
ResolventTable solve_resolvent(const ChannelKernel& K, const EnergyPoint& e, cplx rho, const SolverConfig& cfg);

//! Same table from the second form (kernel on the right), marching down from
//! u: returns a^{row col}(u, u - s) for fixed u and row.
RaySolution solve_resolvent_left(const ChannelKernel& K, const EnergyPoint& e, cplx u, int row, double s_end,
                                 const SolverConfig& cfg);

//! Neumann series of the Volterra equation truncated at n_terms on the ray
//! panel grid (finite for mu0 > 0).
RaySolution neumann_ray(const ChannelKernel& K, const EnergyPoint& e, cplx rho, int fixed, const SolverConfig& cfg,
                        double s_end, int n_terms);

enum class Method { Volterra, Oracle };
std::string to_string(Method m);

struct JostResult {
  cplx value{1.0, 0.0};
  Channel channel{};
  EnergyPoint energy{};
  Method method = Method::Volterra;
  double error = 0;  // order-rerun difference plus tail residual
  double tail = 0;   // magnitude of the tail correction applied
};

//! F^zeta(rho, b) - N^zeta(rho, b) from the resolvent ray.
cplx osjf(const ChannelKernel& K, const EnergyPoint& e, cplx rho, Sign zeta, const SolverConfig& cfg,
          double* tail_out = nullptr);
//! Jost function F^zbar(b) = F^zbar(b, b).
JostResult jost_function(const ChannelKernel& K, const EnergyPoint& e, const SolverConfig& cfg);

//! delta = (1/2i) ln(F_plus / F_minus), reduced to (-pi, pi].
double phase_shift(cplx F_plus, cplx F_minus, bool* near_pole = nullptr);

struct DeterminantResult {
  cplx value{1.0, 0.0};
  double increment = 0;  // |last factor - 1| * degeneracy
};
DeterminantResult determinant_product(std::span<const JostResult> F, int N, double J_max);

struct DispersionConfig {
  double eps_min = 1e-4;
  double eps_max = 1e4;
  int points = 400;
  double tail_mu = 1.0;  // scale of the ln(1 + 4k^2/mu^2)/k tail model
};
struct DispersionResult {
  cplx rhs{};
  double mismatch = 0;
};
//! Compare F(b_eval) with prod (1 - W_n / W) exp{-(1/pi) int d eps delta / (eps - W)}
//! in Schroedinger energies eps = k^2, W = -b^2.
DispersionResult dispersion_check(const std::function<double(double)>& phase_of_eps, std::span<const double> bound_b,
                                  cplx b_eval, cplx F_eval, const DispersionConfig& cfg = {});

//! Continuous phase table on the log grid of dispersion_check, unwrapped from
//! the high-energy end (delta(inf) = 0).
std::vector<std::pair<double, double>> phase_table(const ChannelKernel& K, const SolverConfig& cfg,
                                                   const DispersionConfig& dcfg);

//! (F^zbar_kappa(b | g), F^{-zbar}_{-kappa}(b | -+g)) for vector (g -> -g) or
//! scalar (same g) coupling.
std::pair<JostResult, JostResult> cpt_check(const SpectralWeight& w, InteractionKind kind, const Channel& ch,
                                            const EnergyPoint& e, const SolverConfig& cfg);

//! Dense kernel dump on a u grid for fixed rho.
struct KernelTable {
  std::vector<double> u;
  double rho = 0;
  int dim = 1;
  std::vector<cplx> values;  // [(k * dim + i) * dim + j]
};
KernelTable kernel_table(const ChannelKernel& K, double rho, std::span<const double> u_grid);

}  // namespace jost
