#pragma once

#include <string>
#include <vector>

#include "alloylab/rng.hpp"

namespace alloylab {

// Compactly supported probability density used for the coupling constants.
// Built-in families carry their normalization, sup norm, total variation of f
// (that is ||f'||_L1 when f is W^{1,1}) and exact low moments in closed form.
class DensityModel {
 public:
  enum class Family { Triangular, Uniform, SmoothBump };

  // f(x) = -4|x| + 2 on [-1/2, 1/2].
  static DensityModel triangular();
  // f = indicator of [0, 1]; not W^{1,1}, flagged accordingly.
  static DensityModel uniform();
  // C^1 quartic bump (15/16)(1 - t^2)^2 rescaled to [a, b].
  static DensityModel smooth_bump(double a, double b);
  // Lookup by id: "triangular" | "uniform" | "smooth-bump".
  static DensityModel by_id(const std::string& id);

  Family family() const { return family_; }
  const std::string& id() const { return id_; }
  double support_lo() const { return a_; }
  double support_hi() const { return b_; }

  double pdf(double x) const;
  // Derivative of f where defined; throws NotDifferentiable for the uniform
  // family (no W^{1,1} derivative).
  double dpdf(double x) const;

  double norm_inf() const { return norm_inf_; }
  // ||f'||_L1; throws NotDifferentiable for the uniform family.
  double fprime_l1() const;
  bool has_w11_derivative() const { return has_w11_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  // Interior kink locations plus the support ends; between consecutive points
  // the density is a single polynomial of degree piece_degree().
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  int piece_degree() const { return degree_; }

  // breakpoints() refined so that f' keeps one sign per panel
  std::vector<double> derivative_breakpoints() const;

  // Inverse-CDF sample from a uniform variate in [0, 1). Deterministic and
  // platform independent.
  double sample_from_uniform(double u) const;
  double sample(Rng& rng) const { return sample_from_uniform(rng.uniform01()); }

 private:
  DensityModel() = default;

  Family family_ = Family::Triangular;
  std::string id_;
  double a_ = 0.0, b_ = 0.0;
  double norm_inf_ = 0.0;
  double fprime_l1_ = 0.0;
  bool has_w11_ = true;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::vector<double> breakpoints_;
  int degree_ = 1;
};

}  // namespace alloylab
