#pragma once
// Panel Gauss-Legendre rules and panel-local Lagrange interpolation shared by
// the Volterra and density solvers.

#include <span>
#include <vector>

namespace jost {

//! Gauss-Legendre rule on [-1, 1] (cached per order).
struct GaussRule {
  std::vector<double> x, w;
  static const GaussRule& get(int n);
};

struct Panel {
  double lo = 0, hi = 0;
  std::vector<double> x, w;  // mapped nodes and weights

  double width() const { return hi - lo; }
  bool contains(double s) const { return s >= lo && s < hi; }
};

Panel make_panel(double lo, double hi, int order);

//! Barycentric Lagrange basis of the panel nodes evaluated at t, written to
//! out (size = order).  Exact at the nodes.
void lagrange_basis(const Panel& p, double t, std::span<double> out);

struct PanelGridSpec {
  double origin = 0;          // first breakpoint
  std::vector<double> breaks; // extra mandatory breakpoints (absolute)
  double max_width = 0.5;     // width cap before geometric growth
  double geometric_from = 10; // beyond this coordinate widths grow
  double ratio = 1.3;
  double end = 1e6;
  int order = 16;
};

//! Panels covering [origin, end] with all breakpoints honoured.
std::vector<Panel> build_panels(const PanelGridSpec& spec);

//! Gauss-Chebyshev nodes cos((k+1/2) pi / n) with equal weights 1/n: the
//! average (1/pi) int_0^pi f(cos th) dth.
std::vector<double> chebyshev_nodes(int n);

}  // namespace jost
