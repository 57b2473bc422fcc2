#pragma once

#include <Eigen/Dense>

#include "alloylab/lattice.hpp"

namespace alloylab {

// Finite section of the convolution operator induced by alpha on the index
// set Lambda+: A[j,k] = alpha_{j-k} (zero when j-k is outside Gamma), together
// with its inverse B and the quantities the norm-bound argument needs.
struct ToeplitzTransform {
  IndexBox box;
  ConvolutionVector alpha;
  Eigen::MatrixXd a;            // forward matrix, |Lambda+| square
  Eigen::MatrixXd b;            // inverse
  double det_a = 0.0;
  double det_b = 0.0;
  double row_sum_norm_b = 0.0;
  double condition_estimate = 0.0;

  std::size_t size() const { return box.plus_size(); }
};

// Max absolute row sum.
double row_sum_norm(const Eigen::MatrixXd& m);

// Builds A on box.plus_set(), inverts it and records determinant, row-sum
// norm of the inverse and a condition estimate. Throws SingularTransform when
// the condition estimate exceeds 1e12 (density push-forward would be
// meaningless beyond that).
ToeplitzTransform build_transform(const ConvolutionVector& alpha, const IndexBox& box);

struct NormBoundReport {
  double bound = 0.0;   // |alpha0|^-1 (1 - alpha*/|alpha0|)^-1
  double actual = 0.0;  // row-sum norm of B
  bool holds = false;
};

// Checks ||B|| <= |alpha0|^-1 (1 - alpha*/|alpha0|)^-1, the general form of
// the normalized bound 1/(1-alpha*). Throws NotAdmissible when
// alpha* >= |alpha0|.
NormBoundReport verify_norm_bound(const ToeplitzTransform& t, const ConvolutionVector& alpha);

// eta = A omega and omega = B eta; vectors are indexed by box.plus_set().
Eigen::VectorXd forward_coordinates(const ToeplitzTransform& t, const Eigen::VectorXd& omega);
Eigen::VectorXd inverse_coordinates(const ToeplitzTransform& t, const Eigen::VectorXd& eta);

}  // namespace alloylab
