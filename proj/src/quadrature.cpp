#include "alloylab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "alloylab/errors.hpp"

namespace alloylab {

namespace {

GaussRule compute_gauss(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 64) throw QuadratureFailure("gauss order out of range");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss(order)).first;
  return it->second;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

QuadResult integrate_panels(const std::function<double(double)>& f,
                            const std::vector<double>& pts, int order) {
  QuadResult r;
  if (pts.size() < 2) return r;
  double fine = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    r.value += integrate_gauss(f, pts[i], pts[i + 1], order);
    fine += integrate_gauss(f, pts[i], pts[i + 1], order + 4);
  }
  r.error = std::abs(fine - r.value);
  r.value = fine;
  return r;
}

namespace {

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                 double fm, double fb, double whole, double tol, int depth, int max_depth,
                 QuadResult& out) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double diff = left + right - whole;
  if (depth >= max_depth || std::abs(diff) <= 15.0 * tol) {
    out.value += left + right + diff / 15.0;
    out.error += std::abs(diff) / 15.0;
    return;
  }
  simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth, out);
  simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double abs_tol, int max_depth) {
  QuadResult out;
  if (!(a < b)) return out;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, a, b);
  simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, 0, max_depth, out);
  return out;
}

std::vector<double> clip_sorted_panels(std::vector<double> pts, double lo, double hi) {
  std::vector<double> out;
  if (!(lo < hi)) return out;
  pts.push_back(lo);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  for (double p : pts) {
    if (p < lo || p > hi) continue;
    if (out.empty() || p > out.back() + 1e-14 * (1.0 + std::abs(p))) out.push_back(p);
  }
  if (out.size() < 2) return {};
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace alloylab
