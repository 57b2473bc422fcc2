#include "alloylab/toeplitz.hpp"

#include <cmath>
#include <string>

namespace alloylab {

double row_sum_norm(const Eigen::MatrixXd& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    best = std::max(best, m.row(i).cwiseAbs().sum());
  return best;
}

ToeplitzTransform build_transform(const ConvolutionVector& alpha, const IndexBox& box) {
  const auto& plus = box.plus_set();
  const Eigen::Index n = static_cast<Eigen::Index>(plus.size());

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      const LatticePoint diff = plus[j] - plus[k];
      if (alpha.contains(diff)) a(j, k) = alpha.coeff_at(diff);
    }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  const double cond = (rcond > 0.0) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12))
    throw SingularTransform("toeplitz section numerically singular, cond ~ " + std::to_string(cond));

  Eigen::MatrixXd b = lu.solve(Eigen::MatrixXd::Identity(n, n));
  if (!b.allFinite()) throw SingularTransform("toeplitz inverse has non-finite entries");

  ToeplitzTransform t{box, alpha, std::move(a), std::move(b), 0.0, 0.0, 0.0, cond};
  t.det_a = lu.determinant();
  t.det_b = 1.0 / t.det_a;
  t.row_sum_norm_b = row_sum_norm(t.b);
  return t;
}

NormBoundReport verify_norm_bound(const ToeplitzTransform& t, const ConvolutionVector& alpha) {
  const double a0 = std::abs(alpha.alpha0());
  const double astar = alpha.alpha_star();
  if (!(astar < a0)) throw NotAdmissible("alpha* >= |alpha0|");
  NormBoundReport r;
  r.bound = 1.0 / a0 / (1.0 - astar / a0);
  r.actual = t.row_sum_norm_b;
  r.holds = r.actual <= r.bound + 1e-9;
  return r;
}

Eigen::VectorXd forward_coordinates(const ToeplitzTransform& t, const Eigen::VectorXd& omega) {
  if (omega.size() != static_cast<Eigen::Index>(t.size()))
    throw IndexMismatch("forward_coordinates: field not indexed by Lambda+");
  return t.a * omega;
}

Eigen::VectorXd inverse_coordinates(const ToeplitzTransform& t, const Eigen::VectorXd& eta) {
  if (eta.size() != static_cast<Eigen::Index>(t.size()))
    throw IndexMismatch("inverse_coordinates: field not indexed by Lambda+");
  return t.b * eta;
}

}  // namespace alloylab
