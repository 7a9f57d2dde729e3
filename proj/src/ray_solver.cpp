#include "jost/engine.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace jost {

void RaySolution::eval(double s, std::span<cplx> out) const {
  std::fill(out.begin(), out.begin() + dim, cplx(0));
  if (panels.empty() || s < origin()) return;
  // a point on a panel boundary takes the lower panel, whose far end is
  // clear of whatever forced the break
  auto it = std::lower_bound(panels.begin(), panels.end(), s, [](const Panel& p, double v) { return p.hi < v; });
  const std::size_t p = std::min<std::size_t>(it - panels.begin(), panels.size() - 1);
  std::vector<double> basis(order);
  lagrange_basis(panels[p], std::min(s, panels[p].hi), basis);
  for (int q = 0; q < order; ++q)
    for (int i = 0; i < dim; ++i) out[i] += basis[q] * at(p, q, i);
}

cplx ResolventTable::value(double s, int row, int col) const {
  std::vector<cplx> v(columns.at(col).dim);
  columns[col].eval(s, v);
  return v.at(row);
}

namespace {

// Discretized Volterra operator on one ray.  The unknown is a_i(s) with the
// sheet index `fixed` at the rho end.  Up: a_i(s) = a^{i fixed}(rho + s, rho);
// Down: a_i(s) = a^{fixed i}(rho, rho - s).
class RayOperator {
 public:
  RayOperator(const ChannelKernel& K, const EnergyPoint& e, cplx rho, int fixed, Direction dir,
              const SolverConfig& cfg, double end, int order)
      : K_(K), e_(e), rho_(rho), fixed_(fixed), dir_(dir), n_(order), D_(K.dim()) {
    cfg.validate();
    const double mu0 = K.mu0();
    if (!(mu0 > 0)) throw GridError("solve_ray: kernel threshold must be positive");
    if (fixed < 0 || fixed >= D_) throw std::invalid_argument("solve_ray: sheet index out of range");
    if (end > mu0) {
      PanelGridSpec spec;
      spec.origin = mu0;
      spec.breaks = K.breakpoints(cfg.geometric_from * mu0, cfg.max_breaks);
      for (double b : cfg.extra_breaks) spec.breaks.push_back(b);
      spec.max_width = cfg.width * mu0;
      spec.geometric_from = cfg.geometric_from * mu0;
      spec.ratio = cfg.ratio;
      spec.end = end;
      spec.order = n_;
      panels_ = build_panels(spec);
    }
    los_.reserve(panels_.size());
    for (auto& p : panels_) los_.push_back(p.lo);
    G_.assign(panels_.size() * n_ * D_, 0.0);
    const double scale = K.is_dirac() ? K.mass() : 1.0;
    for (std::size_t p = 0; p < panels_.size(); ++p)
      for (int q = 0; q < n_; ++q) {
        const cplx a = point(panels_[p].x[q]);
        propagate(a, std::span<cplx>(G_.data() + (p * n_ + q) * D_, D_), cfg.guard * scale);
      }
    guard_ = cfg.guard * scale;
  }

  std::size_t panels() const { return panels_.size(); }
  const std::vector<Panel>& grid() const { return panels_; }
  int dim() const { return D_; }

  cplx point(double s) const { return dir_ == Direction::Up ? rho_ + s : rho_ - s; }

  // Coefficient C_c(s, s') of component c: Up K^{ij}(p(s), p(s')), Down K^{ji}(p(s'), p(s)).
  void coef(std::size_t c, double s, double sp, std::span<cplx> out) const {
    if (dir_ == Direction::Up) {
      K_.block(c, point(s), point(sp), out);
      return;
    }
    K_.block(c, point(sp), point(s), tmp_);
    for (int i = 0; i < D_; ++i)
      for (int j = 0; j < D_; ++j) out[i * D_ + j] = tmp_[j * D_ + i];
  }

  void source(double s, std::span<cplx> out) const {
    std::fill(out.begin(), out.end(), cplx(0));
    std::vector<cplx> blk(D_ * D_);
    for (std::size_t c = 0; c < K_.components(); ++c) {
      if (s < K_.delay(c) - 1e-14) continue;
      if (dir_ == Direction::Up) {
        K_.block(c, point(s), rho_, blk);
        for (int i = 0; i < D_; ++i) out[i] += blk[i * D_ + fixed_];
      } else {
        K_.block(c, rho_, point(s), blk);
        for (int i = 0; i < D_; ++i) out[i] += blk[fixed_ * D_ + i];
      }
    }
  }

  // Integral term at node (p, q) using `vals`.  Contributions that depend on
  // the current panel go into M when implicit, else use vals directly.
  void integral(std::size_t p, int q, const std::vector<cplx>& vals, bool implicit, Eigen::MatrixXcd* M,
                std::span<cplx> out) const {
    const double s = panels_[p].x[q];
    const GaussRule& gr = GaussRule::get(n_);
    std::vector<cplx> blk(D_ * D_), gy(D_), ay(D_);
    std::vector<double> basis(n_);
    for (std::size_t c = 0; c < K_.components(); ++c) {
      const double t = s - K_.delay(c);
      if (t <= panels_.front().lo) continue;
      const std::size_t pc =
          static_cast<std::size_t>(std::upper_bound(los_.begin(), los_.end(), t) - los_.begin()) - 1;
      for (std::size_t pp = 0; pp < pc; ++pp)
        for (int q2 = 0; q2 < n_; ++q2) {
          const double sp = panels_[pp].x[q2];
          coef(c, s, sp, blk);
          const std::size_t base = (pp * n_ + q2) * D_;
          const double w = panels_[pp].w[q2];
          for (int i = 0; i < D_; ++i) {
            cplx acc = 0;
            for (int j = 0; j < D_; ++j) acc += blk[i * D_ + j] * G_[base + j] * vals[base + j];
            out[i] += w * acc;
          }
        }
      const double lo = panels_[pc].lo;
      if (t - lo <= 1e-14 * std::max(1.0, t)) continue;
      const double h = 0.5 * (t - lo);
      for (int r = 0; r < n_; ++r) {
        const double y = lo + h * (1.0 + gr.x[r]);
        const double wr = h * gr.w[r];
        lagrange_basis(panels_[pc], y, basis);
        propagate(point(y), gy, guard_);
        coef(c, s, y, blk);
        if (pc == p && implicit) {
          for (int q2 = 0; q2 < n_; ++q2) {
            if (basis[q2] == 0.0) continue;
            for (int i = 0; i < D_; ++i)
              for (int j = 0; j < D_; ++j)
                (*M)(q * D_ + i, q2 * D_ + j) += wr * blk[i * D_ + j] * gy[j] * basis[q2];
          }
          continue;
        }
        std::fill(ay.begin(), ay.end(), cplx(0));
        for (int q2 = 0; q2 < n_; ++q2)
          for (int j = 0; j < D_; ++j) ay[j] += basis[q2] * vals[(pc * n_ + q2) * D_ + j];
        for (int i = 0; i < D_; ++i) {
          cplx acc = 0;
          for (int j = 0; j < D_; ++j) acc += blk[i * D_ + j] * gy[j] * ay[j];
          out[i] += wr * acc;
        }
      }
    }
  }

  RaySolution empty_solution() const {
    RaySolution r;
    r.start = rho_;
    r.dir = dir_;
    r.fixed = fixed_;
    r.dim = D_;
    r.order = n_;
    r.panels = panels_;
    r.values.assign(panels_.size() * n_ * D_, 0.0);
    return r;
  }

 private:
  void propagate(cplx a, std::span<cplx> out, double guard) const {
    K_.propagator(a, e_, out);
    for (int j = 0; j < D_; ++j) {
      if (!std::isfinite(out[j].real()) || !std::isfinite(out[j].imag()) ||
          (guard > 0 && 1.0 / std::abs(out[j]) < guard))
        throw GridError("ray passes within the guard band of a propagator pole at alpha = " +
                        std::to_string(a.real()) + (a.imag() < 0 ? "" : "+") + std::to_string(a.imag()) + "i");
    }
  }

  const ChannelKernel& K_;
  EnergyPoint e_;
  cplx rho_;
  int fixed_;
  Direction dir_;
  int n_, D_;
  double guard_ = 0;
  std::vector<Panel> panels_;
  std::vector<double> los_;
  std::vector<cplx> G_;
  mutable std::vector<cplx> tmp_ = std::vector<cplx>(4);
};

}  // namespace

RaySolution solve_ray(const ChannelKernel& K, const EnergyPoint& e, cplx rho, int fixed, Direction dir,
                      const SolverConfig& cfg, std::optional<double> s_end, int order) {
  const int n = order > 0 ? order : cfg.order;
  const RayOperator op(K, e, rho, fixed, dir, cfg, s_end.value_or(cfg.s_max), n);
  RaySolution sol = op.empty_solution();
  const int D = op.dim();
  const double mu0 = K.mu0();
  Eigen::MatrixXcd M(n * D, n * D);
  Eigen::VectorXcd rhs(n * D);
  std::vector<cplx> buf(D);
  for (std::size_t p = 0; p < op.panels(); ++p) {
    // a panel wider than the smallest delay couples to itself
    const bool implicit = op.grid()[p].width() > mu0 * (1.0 - 1e-12);
    M.setZero();
    for (int q = 0; q < n; ++q) {
      op.source(op.grid()[p].x[q], buf);
      op.integral(p, q, sol.values, implicit, &M, buf);
      for (int i = 0; i < D; ++i) rhs(q * D + i) = buf[i];
    }
    Eigen::VectorXcd x;
    if (implicit) {
      const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n * D, n * D) - M;
      x = A.partialPivLu().solve(rhs);
    } else {
      x = rhs;
    }
    for (int k = 0; k < n * D; ++k) sol.values[p * n * D + k] = x(k);
  }
  return sol;
}

ResolventTable solve_resolvent(const ChannelKernel& K, const EnergyPoint& e, cplx rho, const SolverConfig& cfg) {
  ResolventTable t;
  t.rho = rho;
  for (int c = 0; c < K.dim(); ++c) t.columns.push_back(solve_ray(K, e, rho, c, Direction::Up, cfg));
  return t;
}

RaySolution solve_resolvent_left(const ChannelKernel& K, const EnergyPoint& e, cplx u, int row, double s_end,
                                 const SolverConfig& cfg) {
  return solve_ray(K, e, u, row, Direction::Down, cfg, s_end);
}

RaySolution neumann_ray(const ChannelKernel& K, const EnergyPoint& e, cplx rho, int fixed, const SolverConfig& cfg,
                        double s_end, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("neumann_ray: need at least one term");
  const RayOperator op(K, e, rho, fixed, Direction::Up, cfg, s_end, cfg.order);
  RaySolution sol = op.empty_solution();
  const int n = cfg.order, D = op.dim();
  std::vector<cplx> src(sol.values.size()), buf(D);
  for (std::size_t p = 0; p < op.panels(); ++p)
    for (int q = 0; q < n; ++q) {
      op.source(op.grid()[p].x[q], buf);
      std::copy(buf.begin(), buf.end(), src.begin() + (p * n + q) * D);
    }
  sol.values = src;
  for (int it = 1; it < n_terms; ++it) {
    std::vector<cplx> next = src;
    for (std::size_t p = 0; p < op.panels(); ++p)
      for (int q = 0; q < n; ++q) {
        std::fill(buf.begin(), buf.end(), cplx(0));
        op.integral(p, q, sol.values, false, nullptr, buf);
        for (int i = 0; i < D; ++i) next[(p * n + q) * D + i] += buf[i];
      }
    sol.values.swap(next);
  }
  return sol;
}

}  // namespace jost
