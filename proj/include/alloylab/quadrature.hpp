#pragma once

#include <functional>
#include <vector>

namespace alloylab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimate of the absolute quadrature error
};

// Gauss-Legendre nodes and weights on [-1, 1]. Computed once per order via
// Newton iteration on the Legendre recurrence and cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// Integral of f over [a, b] with a fixed-order rule. Exact for polynomials of
// degree <= 2*order - 1.
double integrate_gauss(const std::function<double(double)>& f, double a, double b, int order);

// Integral over consecutive panels [pts[0], pts[1]], [pts[1], pts[2]], ...
// with a fixed-order rule per panel. The error field compares against an
// order + 4 evaluation.
QuadResult integrate_panels(const std::function<double(double)>& f,
                            const std::vector<double>& pts, int order);

// Classic adaptive Simpson with absolute tolerance. Used where the integrand
// is only piecewise smooth with unknown breakpoints (spectral projections).
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double abs_tol, int max_depth = 24);

// Sorted deduplicated copy of pts restricted to [lo, hi], always including
// the interval ends. Returns empty when lo >= hi.
std::vector<double> clip_sorted_panels(std::vector<double> pts, double lo, double hi);

}  // namespace alloylab
