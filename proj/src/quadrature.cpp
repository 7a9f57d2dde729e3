#include "jost/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace jost {

const GaussRule& GaussRule::get(int n) {
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mtx);
  auto& slot = cache[n];
  if (!slot) {
    if (n < 1) throw std::invalid_argument("GaussRule: order must be positive");
    auto rule = std::make_unique<GaussRule>();
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    rule->x.resize(n);
    rule->w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &rule->x[i], &rule->w[i], t);
    gsl_integration_glfixed_table_free(t);
    // ascending order
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return rule->x[a] < rule->x[b]; });
    GaussRule sorted;
    for (int i : idx) {
      sorted.x.push_back(rule->x[i]);
      sorted.w.push_back(rule->w[i]);
    }
    *rule = std::move(sorted);
    slot = std::move(rule);
  }
  return *slot;
}

Panel make_panel(double lo, double hi, int order) {
  const GaussRule& g = GaussRule::get(order);
  Panel p;
  p.lo = lo;
  p.hi = hi;
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  p.x.resize(order);
  p.w.resize(order);
  for (int i = 0; i < order; ++i) {
    p.x[i] = c + h * g.x[i];
    p.w[i] = h * g.w[i];
  }
  return p;
}

void lagrange_basis(const Panel& p, double t, std::span<double> out) {
  const std::size_t n = p.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (t == p.x[i]) {
      std::fill(out.begin(), out.end(), 0.0);
      out[i] = 1.0;
      return;
    }
  }
  // barycentric weights for Gauss nodes: lambda_i ~ (-1)^i sqrt((1-x_i^2) w_i)
  const GaussRule& g = GaussRule::get(static_cast<int>(n));
  double denom = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = ((i % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - g.x[i] * g.x[i]) * g.w[i]);
    out[i] = lam / (t - p.x[i]);
    denom += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= denom;
}

std::vector<Panel> build_panels(const PanelGridSpec& spec) {
  if (!(spec.end > spec.origin)) throw std::invalid_argument("build_panels: empty range");
  if (spec.max_width <= 0 || spec.ratio <= 1.0) throw std::invalid_argument("build_panels: bad widths");
  std::vector<double> bp{spec.origin, spec.end};
  for (double b : spec.breaks)
    if (b > spec.origin && b < spec.end) bp.push_back(b);
  std::sort(bp.begin(), bp.end());
  const double merge = 1e-9 * std::max(1.0, spec.max_width);
  std::vector<double> uniq;
  for (double b : bp)
    if (uniq.empty() || b - uniq.back() > merge) uniq.push_back(b);
  uniq.back() = spec.end;

  auto cap = [&](double s) {
    if (s < spec.geometric_from) return spec.max_width;
    return std::max(spec.max_width, (spec.ratio - 1.0) * s);
  };
  std::vector<Panel> panels;
  for (std::size_t k = 0; k + 1 < uniq.size(); ++k) {
    double cur = uniq[k];
    const double hi = uniq[k + 1];
    while (cur < hi) {
      const double w = cap(cur);
      double next = cur + w;
      if (next > hi - 0.25 * w) next = hi;
      panels.push_back(make_panel(cur, next, spec.order));
      cur = next;
    }
  }
  return panels;
}

std::vector<double> chebyshev_nodes(int n) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = std::cos((k + 0.5) * std::numbers::pi / n);
  return x;
}

}  // namespace jost
