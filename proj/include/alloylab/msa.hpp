#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "alloylab/hamiltonian.hpp"
#include "alloylab/model.hpp"

namespace alloylab {

// || chi+ (H - E)^{-1} chi- || where chi+ is the width-one boundary collar of
// unit cells (the l minus (l-2) annulus) and chi- the centered l/3 core,
// rounded to whole cells. Computed from direct solves column by column and a
// dense SVD of the extracted block. Throws EnergyResonant when E sits within
// ~1e-8 of the spectrum.
double good_box_norm(const DiscreteHamiltonian& h, double energy);

struct GoodBoxReport {
  double energy = 0.0;
  double gamma = 0.0;
  int side = 0;
  double offdiag_norm = 0.0;
  bool good = false;  // offdiag_norm <= exp(-gamma * side)
  std::uint64_t seed = 0;
};

GoodBoxReport good_box_report(const DiscreteHamiltonian& h, double energy, double gamma,
                              std::uint64_t seed = 0);

struct ProbabilityEstimate {
  double p_hat = 0.0;
  double half_width = 0.0;  // 1.96 sqrt(p(1-p)/n)
  int samples = 0;
};

// Empirical probability that a box of the given side is (gamma, E)-good,
// single-energy surrogate of the initial scale event. Resonant samples count
// as not good.
ProbabilityEstimate good_box_probability(const ModelSpec& model, double energy, double gamma,
                                         int side, int samples, std::uint64_t seed,
                                         int workers = 1);

// Probability that at least one of two disjoint sub-boxes of a common
// periodic box is (gamma, E)-good, both restrictions sharing one coupling
// realization. The standard two-box reading of the multiscale step.
ProbabilityEstimate good_box_pair_probability(const ModelSpec& model, double energy,
                                              double gamma, int sub_side, int big_side,
                                              int samples, std::uint64_t seed, int workers = 1);

struct GoodBoxDecayResult {
  std::vector<int> sides;
  std::vector<double> norms;
  double energy = 0.0;
  double rate = 0.0;  // positive means exponential decay in the side length
};

// Deterministic decay probe: couplings frozen at the density mean, E fixed
// at lambda_min(first box) - offset, norms fitted as exp(-rate * l).
GoodBoxDecayResult fit_goodbox_decay(const ModelSpec& model, double energy_offset,
                                     const std::vector<int>& sides);

// ---------------------------------------------------------------------------
// Discrete geometric resolvent identity for nested boxes.

struct ResolventIdentityInstance {
  ModelSpec model = ModelSpec::standard_1d({1.0, -0.5});
  int big_side = 10;
  int sub_side = 6;
  LatticePoint sub_offset = lattice_point(0);
  std::complex<double> z{0.0, 0.1};
  std::uint64_t field_seed = 1;
  std::uint64_t probe_seed = 2;
  int probe_vectors = 10;
  // replaces the built-in C^1 ramp; still subject to the margin check
  std::optional<Eigen::VectorXd> cutoff_override;
};

// Residual of
//   (H^L - z)^{-1} i^T phi  =  i^T phi (H^L' - z)^{-1}
//                             + (H^L - z)^{-1} i^T [H^L', phi] (H^L' - z)^{-1}
// applied to random vectors, where H^L is the plain submatrix restriction,
// i^T the restriction map and phi a C^1 cutoff vanishing on the outermost
// sub-box cell. The identity is exact in exact arithmetic, so the relative
// residual is solver roundoff. Throws InvalidCutoff when phi has support
// within one mesh point of the sub-box boundary.
double resolvent_identity_residual(const ResolventIdentityInstance& instance);

// The cutoff used by resolvent_identity_residual, exposed for tests.
Eigen::VectorXd resolvent_cutoff(const GridSpec& big_grid, int sub_side,
                                 const LatticePoint& sub_offset);

}  // namespace alloylab
