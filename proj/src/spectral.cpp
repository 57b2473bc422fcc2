#include "alloylab/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "alloylab/experiment.hpp"
#include "alloylab/rng.hpp"

namespace alloylab {

SpectralSummary eigenvalues(const DiscreteHamiltonian& h, std::uint64_t seed) {
  const Eigen::Index n = h.matrix.rows();
  if (n > 10000) throw SizeOverflow("dense eigensolve capped at 10^4 points");
  Eigen::MatrixXd dense(h.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.compute(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ConvergenceFailure("symmetric eigensolver did not converge");
  SpectralSummary s{solver.eigenvalues(), h.grid, seed};
  std::sort(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
  return s;
}

double counting(const SpectralSummary& s, double energy) {
  const double* begin = s.eigenvalues.data();
  const double* end = begin + s.eigenvalues.size();
  const long below = std::lower_bound(begin, end, energy) - begin;  // strict <
  return static_cast<double>(below) / s.box_volume();
}

long trace_projection(const SpectralSummary& s, double e1, double e2) {
  if (e1 > e2) throw ConfigError("trace_projection: empty interval orientation");
  const double* begin = s.eigenvalues.data();
  const double* end = begin + s.eigenvalues.size();
  const long below_e1 = std::lower_bound(begin, end, e1) - begin;
  const long upto_e2 = std::upper_bound(begin, end, e2) - begin;
  return upto_e2 - below_e1;
}

long count_below_inertia(const DiscreteHamiltonian& h, double energy) {
  const Eigen::Index n = h.matrix.rows();
  Eigen::SparseMatrix<double> shifted = h.matrix;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= energy;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(shifted);
  if (ldlt.info() != Eigen::Success)
    throw EnergyResonant("LDL^T factorization failed at this energy");
  const Eigen::VectorXd d = ldlt.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  long negatives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(d[i]) <= 1e-14 * scale)
      throw EnergyResonant("zero pivot: energy resonant with the spectrum");
    if (d[i] < 0.0) ++negatives;
  }
  return negatives;
}

long trace_projection_inertia(const DiscreteHamiltonian& h, double e1, double e2) {
  if (e1 > e2) throw ConfigError("trace_projection_inertia: empty interval orientation");
  const double nudge = 1e-12 * std::max(1.0, std::abs(e2));
  return count_below_inertia(h, e2 + nudge) - count_below_inertia(h, e1);
}

IdsEstimate ids_estimate(const IdsConfig& config, int workers) {
  if (config.samples < 1) throw InsufficientData("ids_estimate: needs samples >= 1");
  if (config.energies.empty()) throw ConfigError("ids_estimate: empty energy grid");

  const GridSpec grid = config.model.grid(config.side);
  const IndexBox box(config.model.dim, config.side, config.model.u.alpha);
  const DensityModel density = config.model.density();
  const int ne = static_cast<int>(config.energies.size());

  IdsEstimate out;
  out.energies = config.energies;
  out.side = config.side;
  out.samples = config.samples;
  out.raw.resize(config.samples, ne);

  parallel_for(config.samples, workers, [&](std::int64_t i) {
    CouplingField field = config.frozen_coupling
                              ? constant_field(box, *config.frozen_coupling)
                              : sample_field(density, box, config.seed + static_cast<std::uint64_t>(i));
    const auto h = assemble_hamiltonian(
        assemble_potential(field, config.model.u, config.model.v0, grid), grid);
    const SpectralSummary s = eigenvalues(h, config.seed + i);
    for (int e = 0; e < ne; ++e) out.raw(i, e) = counting(s, config.energies[e]);
  });

  out.mean_n.resize(ne);
  out.std_n.resize(ne);
  out.std_defined = config.samples >= 2;
  for (int e = 0; e < ne; ++e) {
    std::vector<double> col(config.samples);
    for (int i = 0; i < config.samples; ++i) col[i] = out.raw(i, e);
    const MeanStd ms = mean_std(col);
    out.mean_n[e] = ms.mean;
    out.std_n[e] = out.std_defined ? ms.std : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<Eigen::VectorXd> sample_spectra(const ModelSpec& model, int side, int samples,
                                            std::uint64_t stream_seed, int workers) {
  const GridSpec grid = model.grid(side);
  const IndexBox box(model.dim, side, model.u.alpha);
  const DensityModel density = model.density();
  std::vector<Eigen::VectorXd> spectra(samples);
  parallel_for(samples, workers, [&](std::int64_t i) {
    const CouplingField field =
        sample_field(density, box, stream_seed + static_cast<std::uint64_t>(i));
    const auto h =
        assemble_hamiltonian(assemble_potential(field, model.u, model.v0, grid), grid);
    spectra[i] = eigenvalues(h).eigenvalues;
  });
  return spectra;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InsufficientData("percentile of empty data");
  std::sort(values.begin(), values.end());
  const double rank = std::clamp(p, 0.0, 100.0) / 100.0 * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - lo;
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace alloylab
