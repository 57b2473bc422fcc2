#include "alloylab/density.hpp"

#include <cmath>

#include "alloylab/errors.hpp"

namespace alloylab {

DensityModel DensityModel::triangular() {
  DensityModel d;
  d.family_ = Family::Triangular;
  d.id_ = "triangular";
  d.a_ = -0.5;
  d.b_ = 0.5;
  d.norm_inf_ = 2.0;
  d.fprime_l1_ = 4.0;  // two linear pieces with |slope| 4 over width 1/2 each
  d.has_w11_ = true;
  d.mean_ = 0.0;
  d.variance_ = 1.0 / 24.0;
  d.breakpoints_ = {-0.5, 0.0, 0.5};
  d.degree_ = 1;
  return d;
}

DensityModel DensityModel::uniform() {
  DensityModel d;
  d.family_ = Family::Uniform;
  d.id_ = "uniform";
  d.a_ = 0.0;
  d.b_ = 1.0;
  d.norm_inf_ = 1.0;
  d.fprime_l1_ = std::numeric_limits<double>::quiet_NaN();
  d.has_w11_ = false;
  d.mean_ = 0.5;
  d.variance_ = 1.0 / 12.0;
  d.breakpoints_ = {0.0, 1.0};
  d.degree_ = 0;
  return d;
}

DensityModel DensityModel::smooth_bump(double a, double b) {
  if (!(a < b)) throw ConfigError("smooth-bump: empty support");
  DensityModel d;
  d.family_ = Family::SmoothBump;
  d.id_ = "smooth-bump";
  d.a_ = a;
  d.b_ = b;
  const double h = 0.5 * (b - a);
  d.norm_inf_ = 15.0 / (16.0 * h);
  d.fprime_l1_ = 15.0 / (8.0 * h);  // f increases to its max once, then decreases
  d.has_w11_ = true;
  d.mean_ = 0.5 * (a + b);
  d.variance_ = h * h / 7.0;
  d.breakpoints_ = {a, b};
  d.degree_ = 4;
  return d;
}

DensityModel DensityModel::by_id(const std::string& id) {
  if (id == "triangular") return triangular();
  if (id == "uniform") return uniform();
  if (id == "smooth-bump") return smooth_bump(-0.5, 0.5);
  throw ConfigError("unknown density id: " + id);
}

double DensityModel::pdf(double x) const {
  if (x < a_ || x > b_) return 0.0;
  switch (family_) {
    case Family::Triangular:
      return -4.0 * std::abs(x) + 2.0;
    case Family::Uniform:
      return 1.0;
    case Family::SmoothBump: {
      const double h = 0.5 * (b_ - a_);
      const double t = (x - mean_) / h;
      const double q = 1.0 - t * t;
      return (15.0 / 16.0) * q * q / h;
    }
  }
  return 0.0;
}

double DensityModel::dpdf(double x) const {
  if (!has_w11_) throw NotDifferentiable("density '" + id_ + "' has no W^{1,1} derivative");
  if (x < a_ || x > b_) return 0.0;
  switch (family_) {
    case Family::Triangular:
      return (x < 0.0) ? 4.0 : -4.0;
    case Family::SmoothBump: {
      const double h = 0.5 * (b_ - a_);
      const double t = (x - mean_) / h;
      return -(15.0 / 4.0) * t * (1.0 - t * t) / (h * h);
    }
    default:
      return 0.0;
  }
}

double DensityModel::fprime_l1() const {
  if (!has_w11_) throw NotDifferentiable("density '" + id_ + "' has no W^{1,1} derivative");
  return fprime_l1_;
}

std::vector<double> DensityModel::derivative_breakpoints() const {
  if (family_ == Family::SmoothBump) return {a_, mean_, b_};  // f' flips sign at the center
  return breakpoints_;
}

double DensityModel::sample_from_uniform(double u) const {
  switch (family_) {
    case Family::Triangular:
      if (u <= 0.5) return 0.5 * (std::sqrt(2.0 * u) - 1.0);
      return 0.5 * (1.0 - std::sqrt(2.0 * (1.0 - u)));
    case Family::Uniform:
      return u;
    case Family::SmoothBump: {
      // Bisection on the quintic CDF in the reference coordinate t.
      double lo = -1.0, hi = 1.0;
      for (int it = 0; it < 64; ++it) {
        const double t = 0.5 * (lo + hi);
        const double cdf = (15.0 / 16.0) * (t - (2.0 / 3.0) * t * t * t + 0.2 * std::pow(t, 5) + 8.0 / 15.0);
        (cdf < u ? lo : hi) = t;
      }
      const double h = 0.5 * (b_ - a_);
      return mean_ + h * 0.5 * (lo + hi);
    }
  }
  return a_;
}

}  // namespace alloylab
