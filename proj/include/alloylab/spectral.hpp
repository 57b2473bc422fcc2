#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "alloylab/hamiltonian.hpp"
#include "alloylab/model.hpp"

namespace alloylab {

// Sorted eigenvalues of one finite-volume realization.
struct SpectralSummary {
  Eigen::VectorXd eigenvalues;  // nondecreasing
  GridSpec grid;
  std::uint64_t seed = 0;

  double box_volume() const {
    return grid.dim == 2 ? static_cast<double>(grid.side) * grid.side
                         : static_cast<double>(grid.side);
  }
};

// Full symmetric eigendecomposition (values only). Dense path, n <= 10^4.
SpectralSummary eigenvalues(const DiscreteHamiltonian& h, std::uint64_t seed = 0);

// Normalized counting function N_omega^l(E) = l^{-d} #{ i : lambda_i < E }.
double counting(const SpectralSummary& s, double energy);

// Number of eigenvalues in the closed interval [e1, e2].
long trace_projection(const SpectralSummary& s, double e1, double e2);

// #{ lambda < E } via the inertia of an LDL^T factorization of H - E, the
// spectrum-slicing path that avoids a full eigensolve. Throws EnergyResonant
// when a pivot sits at zero within tolerance.
long count_below_inertia(const DiscreteHamiltonian& h, double energy);

// Closed-interval count via two inertia evaluations. Endpoint ties at e2 are
// resolved by a relative nudge of 1e-12, documented behaviour of this path.
long trace_projection_inertia(const DiscreteHamiltonian& h, double e1, double e2);

struct IdsConfig {
  ModelSpec model = ModelSpec::standard_1d({1.0});
  int side = 10;
  std::vector<double> energies;
  int samples = 10;
  std::uint64_t seed = 1;
  std::optional<double> frozen_coupling;  // zero-disorder runs
};

struct IdsEstimate {
  std::vector<double> energies;
  std::vector<double> mean_n;
  std::vector<double> std_n;  // sample std; NaN with std_defined=false for samples < 2
  int side = 0;
  int samples = 0;
  bool std_defined = true;
  // per-sample counting values, row = sample, col = energy (kept for
  // bootstrap post-processing)
  Eigen::MatrixXd raw;
};

IdsEstimate ids_estimate(const IdsConfig& config, int workers = 1);

// Sorted spectra of `samples` iid realizations at per-sample seeds
// stream_seed + i. Shared by the sweep experiments.
std::vector<Eigen::VectorXd> sample_spectra(const ModelSpec& model, int side, int samples,
                                            std::uint64_t stream_seed, int workers = 1);

// p-th percentile (0..100) with linear interpolation on the sorted data.
double percentile(std::vector<double> values, double p);

}  // namespace alloylab
