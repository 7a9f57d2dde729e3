#pragma once
// Spectral weights Sigma(nu) of generalized Yukawa potentials and the
// quantities derived from them.

#include "jost/channels.hpp"

#include <functional>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jost {

struct WeightLine {
  double g = 0;
  double mu = 0;
};

//! Sigma(nu) += slope * nu for nu >= start (unbounded support).
struct WeightRamp {
  double slope = 0;
  double start = 0;
};

struct WeightSample {
  double nu = 0;
  double sigma = 0;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Delta lines, linear ramps and a piecewise-linear continuum.  The
//! continuum vanishes outside [front().nu, back().nu].
class SpectralWeight {
 public:
  SpectralWeight() = default;
  SpectralWeight(std::vector<WeightLine> lines, std::vector<WeightSample> continuum = {},
                 std::vector<WeightRamp> ramps = {}, std::optional<double> mu0 = std::nullopt);

  static SpectralWeight yukawa(double g, double mu) { return SpectralWeight({{g, mu}}); }

  const std::vector<WeightLine>& lines() const { return lines_; }
  const std::vector<WeightRamp>& ramps() const { return ramps_; }
  const std::vector<WeightSample>& continuum() const { return cont_; }
  double mu0() const { return mu0_; }
  bool empty() const { return lines_.empty() && ramps_.empty() && cont_.empty(); }

  //! Smooth part (continuum plus ramps) at nu; lines excluded.
  double smooth_density(double nu) const;
  //! Breakpoints of the smooth part (continuum knots, ramp starts).
  std::vector<double> smooth_knots() const;
  //! Integral of the smooth part against f(nu) over [lo, hi], exact for
  //! polynomial f of degree <= 2*order-3 on every linear piece.
  double integrate_smooth(double lo, double hi, const std::function<double(double)>& f, int order = 12) const;

  SpectralWeight scaled(double factor) const;
  SpectralWeight plus(const SpectralWeight& other) const;

 private:
  std::vector<WeightLine> lines_;
  std::vector<WeightSample> cont_;
  std::vector<WeightRamp> ramps_;
  double mu0_ = 0;
};

enum class InteractionKind { SchrodingerLocal, DiracVector, DiracScalar, SchrodingerRelCorr, SchrodingerNonlocal };

std::string to_string(InteractionKind k);
InteractionKind interaction_kind_from_string(const std::string& s);

struct Interaction {
  InteractionKind kind = InteractionKind::SchrodingerLocal;
  double mass = 1.0;  // Dirac and relativistic-correction cases
  SpectralWeight sigma;
  SpectralWeight sigma2;  // second weight of the nonlocal form

  bool is_dirac() const { return kind == InteractionKind::DiracVector || kind == InteractionKind::DiracScalar; }
  void validate() const;
};

struct WeightParseError : std::runtime_error {
  WeightParseError(int line, const std::string& what);
  int line;
};

//! Text format, one record per line: `line g mu`, `cont nu sigma`,
//! `mu0 value`, `kind <tag> [m]`; `line2`/`cont2` feed the second weight of
//! the nonlocal kind.  `#` starts a comment.
Interaction parse_weight(std::istream& in);
Interaction load_weight(const std::string& path);

//! V(r) in N dimensions; for N = 3 this is int dnu Sigma(nu) exp(-nu r) / r.
double evaluate_potential(const SpectralWeight& w, int N, double r);
//! <q|V|p> as a function of |q - p| (no subtractions).
double potential_momentum(const SpectralWeight& w, int N, double Q);
//! I_n = int dnu Sigma(nu) nu^n.
double moments(const SpectralWeight& w, int n);

//! Fractional integral/derivative map of a continuum density between
//! dimensions.  Lines are rejected (their image is not a function).
SpectralWeight weyl_transform(const SpectralWeight& w, int N, int D, int n, std::vector<double> nu_out = {});

//! Sigma_kappa for the relativistic-correction kind (N = 3).
SpectralWeight relcorr_weight(const SpectralWeight& w, const Channel& ch, double m);

}  // namespace jost
