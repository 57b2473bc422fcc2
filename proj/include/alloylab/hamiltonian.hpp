#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "alloylab/field.hpp"
#include "alloylab/grid.hpp"
#include "alloylab/model.hpp"

namespace alloylab {

// Finite-volume operator -Laplace_h + V_0 + V_omega on the periodic mesh.
struct DiscreteHamiltonian {
  GridSpec grid;
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd potential;  // diagonal part V_0 + V_omega at mesh points
};

// V_omega(x) = sum_{k in Lambda+} omega_k u(x - k) restricted to the box;
// only bump cells that lie inside [0,l)^d contribute, which keeps the
// operator a function of the truncated vector (omega_k)_{k in Lambda+} and
// makes V_omega coincide with its transformed representation
// sum_{j in Lambda~} eta_j w(x - j), eta = A omega.
Eigen::VectorXd assemble_potential(const CouplingField& field, const SingleSitePotential& u,
                                   const BackgroundPotential& v0, const GridSpec& grid);

// The same potential built from transformed coordinates eta on Lambda~
// (entries of eta outside Lambda~ are ignored).
Eigen::VectorXd assemble_potential_from_eta(const Eigen::VectorXd& eta, const IndexBox& box,
                                            const BaseBump& w, const BackgroundPotential& v0,
                                            const GridSpec& grid);

// Periodic (2d+1)-point stencil Laplacian plus the diagonal potential.
DiscreteHamiltonian assemble_hamiltonian(const Eigen::VectorXd& potential, const GridSpec& grid);

// Convenience: sample -> potential -> operator.
DiscreteHamiltonian assemble_from_seed(const ModelSpec& model, int side, std::uint64_t seed);

// Eigenvalues of the free periodic Laplacian in d=1: (2 - 2cos(2 pi k/n))/h^2.
Eigen::VectorXd free_laplacian_spectrum_1d(const GridSpec& grid);

}  // namespace alloylab
