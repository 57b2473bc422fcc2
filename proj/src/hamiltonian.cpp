#include "alloylab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace alloylab {

namespace {

// Per-cell coefficients s_c = sum_{gamma} alpha_gamma omega_{c - gamma} for
// every cell c of the box. For c in Lambda~ each c - gamma lies in Lambda+.
Eigen::VectorXd cell_coefficients(const CouplingField& field, const ConvolutionVector& alpha,
                                  const GridSpec& grid) {
  const int l = grid.side;
  const int ncells = grid.dim == 2 ? l * l : l;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(ncells);
  for (int cy = 0; cy < (grid.dim == 2 ? l : 1); ++cy)
    for (int cx = 0; cx < l; ++cx) {
      const LatticePoint c = lattice_point(cx, cy);
      double acc = 0.0;
      for (std::size_t g = 0; g < alpha.offsets().size(); ++g) {
        const int idx = field.box.index_of(c - alpha.offsets()[g]);
        if (idx >= 0) acc += alpha.coeffs()[g] * field.values[idx];
      }
      s[cy * l + cx] = acc;
    }
  return s;
}

Eigen::VectorXd potential_from_cells(const Eigen::VectorXd& cell_coeff, const BaseBump& w,
                                     const BackgroundPotential& v0, const GridSpec& grid) {
  const std::int64_t n = grid.total_points();
  const double h = grid.h();
  Eigen::VectorXd v(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto xy = grid.unflatten(i);
    const double x = xy[0] * h, y = xy[1] * h;
    const int cx = static_cast<int>(xy[0]) / grid.mesh;
    const int cy = static_cast<int>(xy[1]) / grid.mesh;
    const double fx = x - cx, fy = y - cy;
    v[i] = cell_coeff[cy * grid.side + cx] * w.value(fx, fy, grid.dim) + v0.value(x, y, grid.dim);
  }
  return v;
}

}  // namespace

Eigen::VectorXd assemble_potential(const CouplingField& field, const SingleSitePotential& u,
                                   const BackgroundPotential& v0, const GridSpec& grid) {
  if (field.box.dim() != grid.dim || field.box.side() != grid.side)
    throw IndexMismatch("assemble_potential: field box does not match grid");
  if (field.values.size() != static_cast<Eigen::Index>(field.box.plus_size()))
    throw IndexMismatch("assemble_potential: field not indexed by Lambda+");
  return potential_from_cells(cell_coefficients(field, u.alpha, grid), u.w, v0, grid);
}

Eigen::VectorXd assemble_potential_from_eta(const Eigen::VectorXd& eta, const IndexBox& box,
                                            const BaseBump& w, const BackgroundPotential& v0,
                                            const GridSpec& grid) {
  if (eta.size() != static_cast<Eigen::Index>(box.plus_size()))
    throw IndexMismatch("assemble_potential_from_eta: eta not indexed by Lambda+");
  const int l = grid.side;
  Eigen::VectorXd cell_coeff(grid.dim == 2 ? l * l : l);
  for (int cy = 0; cy < (grid.dim == 2 ? l : 1); ++cy)
    for (int cx = 0; cx < l; ++cx) {
      const int idx = box.index_of(lattice_point(cx, cy));
      cell_coeff[cy * l + cx] = eta[idx];
    }
  return potential_from_cells(cell_coeff, w, v0, grid);
}

DiscreteHamiltonian assemble_hamiltonian(const Eigen::VectorXd& potential, const GridSpec& grid) {
  const std::int64_t n = grid.total_points();
  if (potential.size() != n) throw IndexMismatch("assemble_hamiltonian: potential length");
  const double ih2 = 1.0 / (grid.h() * grid.h());

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (2 * grid.dim + 1));
  const std::int64_t na = grid.points_per_axis();
  for (std::int64_t i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 2.0 * grid.dim * ih2 + potential[i]);
    const auto xy = grid.unflatten(i);
    for (int axis = 0; axis < grid.dim; ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        auto nb = xy;
        nb[axis] = (nb[axis] + dir + na) % na;
        trip.emplace_back(i, grid.flatten(nb[0], nb[1]), -ih2);
      }
    }
  }
  DiscreteHamiltonian h{grid, Eigen::SparseMatrix<double>(n, n), potential};
  h.matrix.setFromTriplets(trip.begin(), trip.end());
  h.matrix.makeCompressed();
  return h;
}

DiscreteHamiltonian assemble_from_seed(const ModelSpec& model, int side, std::uint64_t seed) {
  const GridSpec grid = model.grid(side);
  const IndexBox box(model.dim, side, model.u.alpha);
  const CouplingField field = sample_field(model.density(), box, seed);
  return assemble_hamiltonian(assemble_potential(field, model.u, model.v0, grid), grid);
}

Eigen::VectorXd free_laplacian_spectrum_1d(const GridSpec& grid) {
  const std::int64_t n = grid.points_per_axis();
  const double ih2 = 1.0 / (grid.h() * grid.h());
  Eigen::VectorXd ev(n);
  for (std::int64_t k = 0; k < n; ++k)
    ev[k] = (2.0 - 2.0 * std::cos(2.0 * M_PI * k / static_cast<double>(n))) * ih2;
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

}  // namespace alloylab
