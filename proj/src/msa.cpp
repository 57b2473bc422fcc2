#include "alloylab/msa.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "alloylab/experiment.hpp"
#include "alloylab/rng.hpp"
#include "alloylab/spectral.hpp"

namespace alloylab {

namespace {

// Mesh indices of cells forming the boundary collar and the centered core.
void collar_core_indices(const GridSpec& grid, std::vector<int>& collar, std::vector<int>& core) {
  if (grid.side < 3) throw ConfigError("good box: side must be >= 3");
  const int l = grid.side;
  const int core_side = std::max(1, static_cast<int>(std::lround(l / 3.0)));
  const int core_lo = (l - core_side) / 2;
  const int core_hi = core_lo + core_side;
  for (std::int64_t i = 0; i < grid.total_points(); ++i) {
    const LatticePoint c = grid.cell_of(i);
    bool in_collar = (c[0] == 0 || c[0] == l - 1);
    bool in_core = (c[0] >= core_lo && c[0] < core_hi);
    if (grid.dim == 2) {
      in_collar = in_collar || (c[1] == 0 || c[1] == l - 1);
      in_core = in_core && (c[1] >= core_lo && c[1] < core_hi);
    }
    if (in_collar)
      collar.push_back(static_cast<int>(i));
    else if (in_core)
      core.push_back(static_cast<int>(i));
  }
}

// Largest singular value of rows(collar) x cols(core) of (M - E)^{-1}.
double resolvent_block_norm(const Eigen::SparseMatrix<double>& m, double energy,
                            const std::vector<int>& collar, const std::vector<int>& core) {
  Eigen::SparseMatrix<double> shifted = m;
  for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) -= energy;
  shifted.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success)
    throw EnergyResonant("resolvent factorization failed at this energy");

  // crude inverse-power estimate of ||(M - E)^{-1}||; a value ~1e8 means E is
  // within ~1e-8 of an eigenvalue
  Eigen::VectorXd probe = Eigen::VectorXd::Ones(m.rows()).normalized();
  for (int it = 0; it < 4; ++it) {
    probe = lu.solve(probe);
    const double norm = probe.norm();
    if (norm >= 1e8) throw EnergyResonant("energy within 1e-8 of an eigenvalue");
    probe /= norm;
  }

  Eigen::MatrixXd block(collar.size(), core.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.rows());
  for (std::size_t c = 0; c < core.size(); ++c) {
    rhs[core[c]] = 1.0;
    const Eigen::VectorXd x = lu.solve(rhs);
    rhs[core[c]] = 0.0;
    for (std::size_t r = 0; r < collar.size(); ++r) block(r, c) = x[collar[r]];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

}  // namespace

double good_box_norm(const DiscreteHamiltonian& h, double energy) {
  std::vector<int> collar, core;
  collar_core_indices(h.grid, collar, core);
  return resolvent_block_norm(h.matrix, energy, collar, core);
}

GoodBoxReport good_box_report(const DiscreteHamiltonian& h, double energy, double gamma,
                              std::uint64_t seed) {
  GoodBoxReport rep;
  rep.energy = energy;
  rep.gamma = gamma;
  rep.side = h.grid.side;
  rep.seed = seed;
  rep.offdiag_norm = good_box_norm(h, energy);
  rep.good = rep.offdiag_norm <= std::exp(-gamma * h.grid.side);
  return rep;
}

ProbabilityEstimate good_box_probability(const ModelSpec& model, double energy, double gamma,
                                         int side, int samples, std::uint64_t seed,
                                         int workers) {
  if (samples < 1) throw InsufficientData("good_box_probability: needs samples >= 1");
  std::vector<double> good(samples, 0.0);
  const double threshold = std::exp(-gamma * side);
  parallel_for(samples, workers, [&](std::int64_t i) {
    const auto h = assemble_from_seed(model, side, seed + static_cast<std::uint64_t>(i));
    try {
      good[i] = (good_box_norm(h, energy) <= threshold) ? 1.0 : 0.0;
    } catch (const EnergyResonant&) {
      good[i] = 0.0;
    }
  });
  double p = 0.0;
  for (double g : good) p += g;
  p /= samples;
  ProbabilityEstimate est;
  est.p_hat = p;
  est.half_width = 1.96 * std::sqrt(std::max(0.0, p * (1.0 - p)) / samples);
  est.samples = samples;
  return est;
}

namespace {

std::vector<int> subbox_mesh_indices(const GridSpec& big, int sub_side,
                                     const LatticePoint& offset) {
  if (offset[0] < 0 || offset[0] + sub_side > big.side ||
      (big.dim == 2 && (offset[1] < 0 || offset[1] + sub_side > big.side)))
    throw ConfigError("sub-box does not fit inside the big box without wrap");
  const GridSpec local(big.dim, sub_side, big.mesh);
  std::vector<int> idx(local.total_points());
  for (std::int64_t i = 0; i < local.total_points(); ++i) {
    const auto xy = local.unflatten(i);
    idx[i] = static_cast<int>(big.flatten(xy[0] + static_cast<std::int64_t>(offset[0]) * big.mesh,
                                          xy[1] + static_cast<std::int64_t>(offset[1]) * big.mesh));
  }
  return idx;
}

Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& m,
                                      const std::vector<int>& idx) {
  std::vector<int> where(m.rows(), -1);
  for (std::size_t i = 0; i < idx.size(); ++i) where[idx[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> trip;
  for (int col : idx)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it)
      if (where[it.row()] >= 0)
        trip.emplace_back(where[it.row()], where[col], it.value());
  Eigen::SparseMatrix<double> out(idx.size(), idx.size());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

}  // namespace

ProbabilityEstimate good_box_pair_probability(const ModelSpec& model, double energy,
                                              double gamma, int sub_side, int big_side,
                                              int samples, std::uint64_t seed, int workers) {
  if (2 * sub_side > big_side)
    throw ConfigError("good_box_pair_probability: sub boxes must be disjoint");
  const GridSpec big = model.grid(big_side);
  const LatticePoint off_a = lattice_point(0, 0);
  const LatticePoint off_b = model.dim == 2 ? lattice_point(big_side / 2, 0)
                                            : lattice_point(big_side / 2);
  const auto idx_a = subbox_mesh_indices(big, sub_side, off_a);
  const auto idx_b = subbox_mesh_indices(big, sub_side, off_b);
  const GridSpec local(model.dim, sub_side, model.mesh);
  std::vector<int> collar, core;
  collar_core_indices(local, collar, core);
  const double threshold = std::exp(-gamma * sub_side);

  std::vector<double> good(samples, 0.0);
  parallel_for(samples, workers, [&](std::int64_t i) {
    const auto h = assemble_from_seed(model, big_side, seed + static_cast<std::uint64_t>(i));
    auto is_good = [&](const std::vector<int>& idx) {
      try {
        return resolvent_block_norm(submatrix(h.matrix, idx), energy, collar, core) <= threshold;
      } catch (const EnergyResonant&) {
        return false;
      }
    };
    good[i] = (is_good(idx_a) || is_good(idx_b)) ? 1.0 : 0.0;
  });
  double p = 0.0;
  for (double g : good) p += g;
  p /= samples;
  ProbabilityEstimate est;
  est.p_hat = p;
  est.half_width = 1.96 * std::sqrt(std::max(0.0, p * (1.0 - p)) / samples);
  est.samples = samples;
  return est;
}

GoodBoxDecayResult fit_goodbox_decay(const ModelSpec& model, double energy_offset,
                                     const std::vector<int>& sides) {
  if (sides.size() < 2) throw InsufficientData("decay fit needs >= 2 box sides");
  GoodBoxDecayResult out;
  out.sides = sides;
  const double mean_coupling = model.density().mean();

  bool first = true;
  for (int side : sides) {
    const GridSpec grid = model.grid(side);
    const IndexBox box(model.dim, side, model.u.alpha);
    const CouplingField field = constant_field(box, mean_coupling);
    const auto h =
        assemble_hamiltonian(assemble_potential(field, model.u, model.v0, grid), grid);
    if (first) {
      const SpectralSummary s = eigenvalues(h);
      out.energy = s.eigenvalues[0] - energy_offset;
      first = false;
    }
    out.norms.push_back(good_box_norm(h, out.energy));
  }

  Eigen::MatrixXd x(sides.size(), 2);
  Eigen::VectorXd y(sides.size());
  for (std::size_t i = 0; i < sides.size(); ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = static_cast<double>(sides[i]);
    y[i] = std::log(std::max(out.norms[i], 1e-300));
  }
  out.rate = -x.colPivHouseholderQr().solve(y)[1];
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// 1-d profile inside a sub-box [o, o + l): zero on the outermost cell, C^1
// ramp across the next cell, one in the middle.
double ramp_profile(double x, double lo, double hi) {
  const double a = x - lo, b = hi - x;
  if (a <= 1.0 || b <= 1.0) return 0.0;
  return smoothstep(a - 1.0) * smoothstep(b - 1.0);
}

}  // namespace

Eigen::VectorXd resolvent_cutoff(const GridSpec& big_grid, int sub_side,
                                 const LatticePoint& sub_offset) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(big_grid.total_points());
  const double h = big_grid.h();
  for (std::int64_t i = 0; i < big_grid.total_points(); ++i) {
    const auto xy = big_grid.unflatten(i);
    double v = ramp_profile(xy[0] * h, sub_offset[0], sub_offset[0] + sub_side);
    if (big_grid.dim == 2)
      v *= ramp_profile(xy[1] * h, sub_offset[1], sub_offset[1] + sub_side);
    phi[i] = v;
  }
  return phi;
}

double resolvent_identity_residual(const ResolventIdentityInstance& instance) {
  using Complex = std::complex<double>;
  const ModelSpec& model = instance.model;
  const GridSpec big = model.grid(instance.big_side);
  if (instance.sub_side < 5)
    throw ConfigError("resolvent identity: sub-box side must be >= 5 for a C^1 cutoff");
  const auto idx = subbox_mesh_indices(big, instance.sub_side, instance.sub_offset);
  const auto h_big = assemble_from_seed(model, instance.big_side, instance.field_seed);
  const Eigen::VectorXd phi =
      instance.cutoff_override
          ? *instance.cutoff_override
          : resolvent_cutoff(big, instance.sub_side, instance.sub_offset);
  if (phi.size() != big.total_points())
    throw InvalidCutoff("cutoff override has the wrong mesh size");

  // margin check: the stencil around supp(phi) must stay inside the sub-box
  {
    std::vector<char> in_sub(big.total_points(), 0);
    for (int i : idx) in_sub[i] = 1;
    const std::int64_t na = big.points_per_axis();
    for (std::int64_t i = 0; i < big.total_points(); ++i) {
      if (phi[i] == 0.0) continue;
      const auto xy = big.unflatten(i);
      for (int axis = 0; axis < big.dim; ++axis)
        for (int dir = -1; dir <= 1; dir += 2) {
          auto nb = xy;
          nb[axis] = (nb[axis] + dir + na) % na;
          if (!in_sub[big.flatten(nb[0], nb[1])])
            throw InvalidCutoff("cutoff support reaches the sub-box boundary");
        }
    }
  }

  const Eigen::Index n = big.total_points();
  const Eigen::Index ns = static_cast<Eigen::Index>(idx.size());
  Eigen::SparseMatrix<Complex> big_shifted = h_big.matrix.cast<Complex>();
  for (Eigen::Index i = 0; i < n; ++i) big_shifted.coeffRef(i, i) -= instance.z;
  big_shifted.makeCompressed();
  Eigen::SparseMatrix<Complex> sub_shifted = submatrix(h_big.matrix, idx).cast<Complex>();
  for (Eigen::Index i = 0; i < ns; ++i) sub_shifted.coeffRef(i, i) -= instance.z;
  sub_shifted.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu_big, lu_sub;
  lu_big.compute(big_shifted);
  lu_sub.compute(sub_shifted);
  if (lu_big.info() != Eigen::Success || lu_sub.info() != Eigen::Success)
    throw EnergyResonant("resolvent identity: z not in both resolvent sets");

  auto restrict_sub = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out(ns);
    for (Eigen::Index i = 0; i < ns; ++i) out[i] = v[idx[i]];
    return out;
  };

  const Eigen::VectorXcd phic = phi.cast<Complex>();
  const Eigen::SparseMatrix<Complex> hc = h_big.matrix.cast<Complex>();
  Rng rng(instance.probe_seed);
  double worst = 0.0;
  for (int probe = 0; probe < instance.probe_vectors; ++probe) {
    Eigen::VectorXcd psi(n);
    for (Eigen::Index i = 0; i < n; ++i)
      psi[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    psi.normalize();

    const Eigen::VectorXcd lhs = lu_sub.solve(restrict_sub(phic.cwiseProduct(psi)));
    const Eigen::VectorXcd v = lu_big.solve(psi);
    if (!lhs.allFinite() || !v.allFinite() || v.norm() > 1e12)
      throw EnergyResonant("resolvent identity: z too close to the spectrum");
    const Eigen::VectorXcd phi_v = phic.cwiseProduct(v);
    // [H, phi] v = H (phi v) - phi (H v), computed matrix-free; the cutoff
    // term enters with the sign of -[H, phi]
    const Eigen::VectorXcd commutator = hc * phi_v - phic.cwiseProduct(hc * v);
    const Eigen::VectorXcd rhs = restrict_sub(phi_v) - lu_sub.solve(restrict_sub(commutator));

    const double scale = std::max({lhs.norm(), rhs.norm(), 1e-300});
    worst = std::max(worst, (lhs - rhs).norm() / scale);
  }
  return worst;
}

}  // namespace alloylab
