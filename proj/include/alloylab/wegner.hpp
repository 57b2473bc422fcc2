#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alloylab/common_density.hpp"
#include "alloylab/model.hpp"
#include "alloylab/spectral.hpp"

namespace alloylab {

// Monte Carlo sweep over (epsilon, box size) cells measuring the expected
// trace of the spectral projection onto [E - eps, E].
struct WegnerSweepConfig {
  ModelSpec model = ModelSpec::standard_1d({1.0, -0.5}, 5);
  std::vector<double> epsilons;  // positive, decreasing, ideally octave spaced
  std::vector<int> box_sizes;
  int samples = 100;
  double energy_percentile = 5.0;        // E from the pooled spectrum
  std::optional<double> energy;          // absolute override
  std::uint64_t seed = 1;
  // Linear-window selection. A cell is kept only if the probed interval sits
  // about spacing_multiple mean level spacings of the pooled sample spectrum
  // (equivalently: pooled event count >= spacing_multiple) and the octave
  // ratio mean(2 eps)/mean(eps) stays within curvature_tolerance of 2.
  double spacing_multiple = 10.0;
  double curvature_tolerance = 0.25;

  void validate() const;
};

struct SweepCell {
  int side = 0;
  double eps = 0.0;
  int samples = 0;
  double mean = 0.0;
  double half_width = 0.0;
  double events = 0.0;  // samples * mean
  bool valid = true;
  std::string flag;  // "", "empty", "below-spacing", "curved"
};

struct WegnerSweepResult {
  double energy = 0.0;
  std::vector<SweepCell> cells;
  std::vector<double> epsilons;
  std::vector<int> box_sizes;
  std::vector<double> transform_row_norms;  // ||B_l|| per box size
  int dim = 1;
  std::uint64_t seed = 0;
  int samples = 0;
  // per box size: samples x epsilons matrix of interval counts
  std::map<int, Eigen::MatrixXd> counts;
};

WegnerSweepResult run_wegner_sweep(const WegnerSweepConfig& config, int workers = 1);

struct TraceStats {
  double mean = 0.0;
  double half_width = 0.0;
};

// Monte Carlo estimate of E[Tr P([E - eps, E])] for one cell.
TraceStats expected_trace(const ModelSpec& model, double energy, double eps, int side,
                          int samples, std::uint64_t seed, int workers = 1);

struct ScalingFitResult {
  double slope_eps = 0.0;
  double slope_vol = 0.0;
  double ci_eps_lo = 0.0, ci_eps_hi = 0.0;  // bootstrap 95% interval
  double ci_vol_lo = 0.0, ci_vol_hi = 0.0;
  double wegner_constant = 0.0;  // max over cells of mean/(eps l^d)
  double r_squared = 0.0;
  double q_norm_growth = 0.0;        // fitted exponent of ||B_l|| in l
  double bound_volume_exponent = 0;  // d + q, the proven trace exponent
  int cells_used = 0;
  int bootstrap_resamples = 0;
};

// Joint log-log least squares log(mean) ~ a log(eps) + b log(l) over the
// valid cells, with bootstrap confidence intervals over the sample axis.
ScalingFitResult fit_scaling(const WegnerSweepResult& sweep, int bootstrap = 200,
                             std::uint64_t bootstrap_seed = 0x5eed);

// ---------------------------------------------------------------------------
// Small-instance checks of the proof inequalities.

struct SpavInstance {
  ModelSpec model = ModelSpec::standard_1d({1.0, -0.5});
  int side = 2;
  LatticePoint site = lattice_point(0);  // j, a Lambda~ cell
  double i_lo = 0.0, i_hi = 1.0;
  Eigen::VectorXd phi;  // normalized mesh vector
  Eigen::VectorXd eta;  // indexed by Lambda+; entry at j is integrated out
};

struct SpavReport {
  double lhs = 0.0;  // int k(eta) s(eta) d eta_j
  double rhs = 0.0;  // |I| sup_{eta_j} k(eta)
  double quadrature_error = 0.0;
  bool holds = false;
};

SpavReport spectral_averaging_check(const SpavInstance& instance);

SpavInstance make_random_spav_instance(const ModelSpec& model, int side, std::uint64_t seed);

struct MainEstimateInstance {
  ModelSpec model = ModelSpec::standard_1d({1.0, -0.5});
  int side = 2;
  LatticePoint site = lattice_point(0);
  double i_lo = 0.0, i_hi = 1.0;
  Eigen::VectorXd phi;
  int samples = 500;
  std::uint64_t seed = 1;
};

struct MainEstimateReport {
  double lhs_mean = 0.0;
  double lhs_half_width = 0.0;
  double rhs = 0.0;  // |I| ||f'||_L1 ||B||
  bool holds = false;
};

MainEstimateReport main_estimate_check(const MainEstimateInstance& instance, int workers = 1);

MainEstimateInstance make_random_main_estimate_instance(const ModelSpec& model, int side,
                                                        int samples, std::uint64_t seed);

}  // namespace alloylab
