#include "alloylab/common_density.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "alloylab/errors.hpp"

namespace alloylab {

CommonDensity::CommonDensity(ToeplitzTransform transform, DensityModel base)
    : transform_(std::move(transform)), base_(std::move(base)),
      abs_det_b_(std::abs(transform_.det_b)) {}

double CommonDensity::eval(const Eigen::VectorXd& eta) const {
  if (eta.size() != static_cast<Eigen::Index>(transform_.size()))
    throw IndexMismatch("common density: eta not indexed by Lambda+");
  const Eigen::VectorXd omega = transform_.b * eta;
  double prod = abs_det_b_;
  for (Eigen::Index i = 0; i < omega.size(); ++i) {
    prod *= base_.pdf(omega[i]);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

Eigen::VectorXd CommonDensity::argmax() const {
  double xstar = 0.5 * (base_.support_lo() + base_.support_hi());
  if (base_.family() == DensityModel::Family::Triangular) xstar = 0.0;
  const Eigen::VectorXd omega = Eigen::VectorXd::Constant(size(), xstar);
  return transform_.a * omega;
}

double CommonDensity::sup_value() const {
  return abs_det_b_ * std::pow(base_.norm_inf(), size());
}

namespace {

// Interval and kink structure of t -> k(eta + t e_j) along coordinate j.
struct LineSection {
  bool empty = false;       // integrand identically zero
  double lo = 0.0, hi = 0.0;
  std::vector<double> panels;  // breakpoints incl. endpoints
  Eigen::VectorXd offset;      // c = B * (eta with eta_j = 0)
  Eigen::VectorXd column;      // column j of B
};

LineSection line_section(const CommonDensity& cd, int j, const Eigen::VectorXd& eta) {
  const auto& t = cd.transform();
  const auto& f = cd.base();
  const int n = cd.size();
  if (j < 0 || j >= n) throw IndexMismatch("coordinate index out of range");
  if (eta.size() != n) throw IndexMismatch("eta not indexed by Lambda+");

  LineSection sec;
  Eigen::VectorXd eta0 = eta;
  eta0[j] = 0.0;
  sec.offset = t.b * eta0;
  sec.column = t.b.col(j);

  const double a = f.support_lo(), b = f.support_hi();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::vector<double> kinks;
  for (int k = 0; k < n; ++k) {
    const double c = sec.offset[k], s = sec.column[k];
    if (s == 0.0) {
      if (f.pdf(c) == 0.0) {
        sec.empty = true;
        return sec;
      }
      continue;
    }
    const double t0 = (a - c) / s, t1 = (b - c) / s;
    lo = std::max(lo, std::min(t0, t1));
    hi = std::min(hi, std::max(t0, t1));
    for (double brk : f.breakpoints()) kinks.push_back((brk - c) / s);
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    sec.empty = true;
    return sec;
  }
  sec.lo = lo;
  sec.hi = hi;
  sec.panels = clip_sorted_panels(std::move(kinks), lo, hi);
  if (sec.panels.empty()) sec.empty = true;
  return sec;
}

int marginal_gauss_order(const CommonDensity& cd) {
  const int degree_total = cd.size() * cd.base().piece_degree();
  return std::min(30, std::max(4, degree_total / 2 + 2));
}

}  // namespace

QuadResult marginal_density(const CommonDensity& cd, int j, const Eigen::VectorXd& eta) {
  if (cd.size() > 12) throw QuadratureFailure("marginal_density: L > 12");
  LineSection sec = line_section(cd, j, eta);
  if (sec.empty) return {0.0, 0.0};

  const auto& f = cd.base();
  const double det = std::abs(cd.transform().det_b);
  const int n = cd.size();
  auto integrand = [&](double t) {
    double prod = det;
    for (int k = 0; k < n; ++k) {
      prod *= f.pdf(sec.offset[k] + sec.column[k] * t);
      if (prod == 0.0) return 0.0;
    }
    return prod;
  };
  QuadResult r = integrate_panels(integrand, sec.panels, marginal_gauss_order(cd));
  if (r.error > 1e-8 * std::max(std::abs(r.value), 1e-300) && r.error > 1e-300)
    throw QuadratureFailure("marginal_density: error estimate above 1e-8 relative");
  return r;
}

ConditionalDensityReport conditional_density(const CommonDensity& cd, int j,
                                             const Eigen::VectorXd& eta) {
  ConditionalDensityReport rep;
  rep.j = j;
  rep.eta = eta;
  rep.k_value = cd.eval(eta);
  QuadResult g = marginal_density(cd, j, eta);
  rep.marginal_g = g.value;
  rep.quadrature_error = g.error;
  rep.defined = g.value >= 1e-14;
  rep.rho = rep.defined ? rep.k_value / rep.marginal_g : 0.0;
  return rep;
}

std::vector<double> coordinate_panels(const CommonDensity& cd, int j, const Eigen::VectorXd& eta) {
  LineSection sec = line_section(cd, j, eta);
  if (sec.empty) return {};
  return sec.panels;
}

double sup_over_coordinate(const CommonDensity& cd, int j, const Eigen::VectorXd& eta) {
  LineSection sec = line_section(cd, j, eta);
  if (sec.empty) return 0.0;
  const auto& f = cd.base();
  const double det = std::abs(cd.transform().det_b);
  const int n = cd.size();
  auto value = [&](double t) {
    double prod = det;
    for (int k = 0; k < n; ++k) {
      prod *= f.pdf(sec.offset[k] + sec.column[k] * t);
      if (prod == 0.0) return 0.0;
    }
    return prod;
  };
  double best = 0.0;
  for (std::size_t p = 0; p + 1 < sec.panels.size(); ++p) {
    double lo = sec.panels[p], hi = sec.panels[p + 1];
    // coarse scan, then golden-section refinement around the best point
    const int grid = 33;
    double tbest = lo, vbest = value(lo);
    for (int i = 1; i <= grid; ++i) {
      const double t = lo + (hi - lo) * i / grid;
      const double v = value(t);
      if (v > vbest) {
        vbest = v;
        tbest = t;
      }
    }
    double gl = std::max(lo, tbest - (hi - lo) / grid);
    double gr = std::min(hi, tbest + (hi - lo) / grid);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
      const double t1 = gr - phi * (gr - gl), t2 = gl + phi * (gr - gl);
      if (value(t1) < value(t2))
        gl = t1;
      else
        gr = t2;
    }
    vbest = std::max(vbest, value(0.5 * (gl + gr)));
    best = std::max(best, vbest);
  }
  return best;
}

namespace {

struct GradCell {
  std::vector<double> lo, hi;
  double abs_value = 0.0;   // Gauss estimate of |g| over the cell
  double gap = 0.0;         // abs_value - |signed Gauss|, refinement priority
};

struct GradWorkspace {
  const DensityModel* f;
  std::vector<double> coef;  // column j of B
  std::vector<int> active;   // indices m with coef[m] != 0
  int order;
  const GaussRule* rule;

  double eval_signed(const std::vector<double>& w) const {
    const int n = static_cast<int>(w.size());
    std::vector<double> fv(n), prefix(n + 1), suffix(n + 1);
    for (int k = 0; k < n; ++k) fv[k] = f->pdf(w[k]);
    prefix[0] = 1.0;
    for (int k = 0; k < n; ++k) prefix[k + 1] = prefix[k] * fv[k];
    suffix[n] = 1.0;
    for (int k = n - 1; k >= 0; --k) suffix[k] = suffix[k + 1] * fv[k];
    double g = 0.0;
    for (int m : active) g += coef[m] * f->dpdf(w[m]) * prefix[m] * suffix[m + 1];
    return g;
  }

  void integrate_cell(GradCell& cell) const {
    const int n = static_cast<int>(cell.lo.size());
    std::vector<int> idx(n, 0);
    std::vector<double> w(n);
    double vol = 1.0;
    for (int k = 0; k < n; ++k) vol *= 0.5 * (cell.hi[k] - cell.lo[k]);
    double sum_abs = 0.0, sum_signed = 0.0;
    for (;;) {
      double weight = 1.0;
      for (int k = 0; k < n; ++k) {
        const double mid = 0.5 * (cell.lo[k] + cell.hi[k]);
        const double half = 0.5 * (cell.hi[k] - cell.lo[k]);
        w[k] = mid + half * rule->nodes[idx[k]];
        weight *= rule->weights[idx[k]];
      }
      const double g = eval_signed(w);
      sum_abs += weight * std::abs(g);
      sum_signed += weight * g;
      int k = 0;
      while (k < n && ++idx[k] == order) idx[k++] = 0;
      if (k == n) break;
    }
    cell.abs_value = sum_abs * vol;
    cell.gap = std::max(0.0, cell.abs_value - std::abs(sum_signed * vol));
  }
};

}  // namespace

QuadResult grad_density_integral(const CommonDensity& cd, int j) {
  const int n = cd.size();
  if (n > 6) throw QuadratureFailure("grad_density_integral: L > 6");
  const auto& f = cd.base();
  if (!f.has_w11_derivative())
    throw NotDifferentiable("grad_density_integral needs a W^{1,1} density");
  if (j < 0 || j >= n) throw IndexMismatch("coordinate index out of range");

  GradWorkspace ws;
  ws.f = &f;
  ws.coef.resize(n);
  for (int m = 0; m < n; ++m) {
    ws.coef[m] = cd.transform().b(m, j);
    if (ws.coef[m] != 0.0) ws.active.push_back(m);
  }
  if (ws.active.empty()) return {0.0, 0.0};
  ws.order = std::max(4, f.piece_degree() / 2 + 2);
  ws.rule = &gauss_legendre(ws.order);

  // Initial cells: tensor product of per-axis panels on which both f and f'
  // are single polynomials with f' of one sign.
  const auto brk = f.derivative_breakpoints();
  const int pieces = static_cast<int>(brk.size()) - 1;
  std::vector<GradCell> cells;
  std::vector<int> pc(n, 0);
  for (;;) {
    GradCell c;
    c.lo.resize(n);
    c.hi.resize(n);
    for (int k = 0; k < n; ++k) {
      c.lo[k] = brk[pc[k]];
      c.hi[k] = brk[pc[k] + 1];
    }
    cells.push_back(std::move(c));
    int k = 0;
    while (k < n && ++pc[k] == pieces) pc[k++] = 0;
    if (k == n) break;
  }

  auto cmp = [](const GradCell& a, const GradCell& b) { return a.gap < b.gap; };
  std::priority_queue<GradCell, std::vector<GradCell>, decltype(cmp)> queue(cmp);
  double total = 0.0, gap_total = 0.0;
  for (auto& c : cells) {
    ws.integrate_cell(c);
    total += c.abs_value;
    gap_total += c.gap;
    queue.push(std::move(c));
  }

  double col_sum = 0.0;
  for (int m : ws.active) col_sum += std::abs(ws.coef[m]);
  const double scale = f.fprime_l1() * col_sum;
  const double tol = std::max(1e-12, 1e-5 * scale);
  const std::size_t max_cells = 20000;
  std::size_t processed = cells.size();

  while (gap_total > tol && processed < max_cells && !queue.empty()) {
    GradCell top = queue.top();
    queue.pop();
    if (top.gap <= 0.0) break;
    total -= top.abs_value;
    gap_total -= top.gap;
    int axis = 0;
    double width = 0.0;
    for (int k = 0; k < n; ++k)
      if (top.hi[k] - top.lo[k] > width) {
        width = top.hi[k] - top.lo[k];
        axis = k;
      }
    const double mid = 0.5 * (top.lo[axis] + top.hi[axis]);
    for (int half = 0; half < 2; ++half) {
      GradCell c = top;
      (half == 0 ? c.hi : c.lo)[axis] = mid;
      ws.integrate_cell(c);
      total += c.abs_value;
      gap_total += c.gap;
      queue.push(std::move(c));
      ++processed;
    }
  }
  return {total, gap_total};
}

QuadResult integrate_total(const CommonDensity& cd) {
  const int n = cd.size();
  if (n > 4) throw QuadratureFailure("integrate_total: L > 4");
  const auto& f = cd.base();
  const auto& brk = f.breakpoints();
  const int pieces = static_cast<int>(brk.size()) - 1;
  const int order = std::max(3, f.piece_degree() / 2 + 2);
  const GaussRule& rule = gauss_legendre(order);
  const double abs_det_a = std::abs(cd.transform().det_a);

  // Substitute eta = A omega; integrate k(A omega) |det A| over the omega box
  // through the full evaluation path.
  double total = 0.0, coarse = 0.0;
  std::vector<int> pc(n, 0);
  Eigen::VectorXd w(n);
  for (;;) {
    std::vector<double> lo(n), hi(n);
    double vol = 1.0;
    for (int k = 0; k < n; ++k) {
      lo[k] = brk[pc[k]];
      hi[k] = brk[pc[k] + 1];
      vol *= 0.5 * (hi[k] - lo[k]);
    }
    for (int pass = 0; pass < 2; ++pass) {
      const GaussRule& r = pass == 0 ? rule : gauss_legendre(order + 3);
      const int p = pass == 0 ? order : order + 3;
      std::vector<int> idx(n, 0);
      double sum = 0.0;
      for (;;) {
        double weight = 1.0;
        for (int k = 0; k < n; ++k) {
          w[k] = 0.5 * (lo[k] + hi[k]) + 0.5 * (hi[k] - lo[k]) * r.nodes[idx[k]];
          weight *= r.weights[idx[k]];
        }
        sum += weight * cd.eval(cd.transform().a * w);
        int k = 0;
        while (k < n && ++idx[k] == p) idx[k++] = 0;
        if (k == n) break;
      }
      (pass == 0 ? coarse : total) += sum * vol * abs_det_a;
    }
    int k = 0;
    while (k < n && ++pc[k] == pieces) pc[k++] = 0;
    if (k == n) break;
  }
  return {total, std::abs(total - coarse)};
}

}  // namespace alloylab
