#pragma once

#include <Eigen/Dense>

#include "alloylab/density.hpp"
#include "alloylab/quadrature.hpp"
#include "alloylab/toeplitz.hpp"

namespace alloylab {

// Push-forward of the product density prod_k f(omega_k) under eta = A omega:
//   k(eta) = |det B| * prod_{k in Lambda+} f((B eta)_k).
class CommonDensity {
 public:
  CommonDensity(ToeplitzTransform transform, DensityModel base);

  const ToeplitzTransform& transform() const { return transform_; }
  const DensityModel& base() const { return base_; }
  int size() const { return static_cast<int>(transform_.size()); }

  double eval(const Eigen::VectorXd& eta) const;

  // Supremum of k over the whole space: |det B| * ||f||_inf^L, attained at
  // eta = A omega* with omega* the componentwise maximizer of f.
  double sup_value() const;
  Eigen::VectorXd argmax() const;

 private:
  ToeplitzTransform transform_;
  DensityModel base_;
  double abs_det_b_;
};

struct ConditionalDensityReport {
  int j = 0;
  Eigen::VectorXd eta;
  double k_value = 0.0;
  double marginal_g = 0.0;
  double rho = 0.0;
  double quadrature_error = 0.0;
  bool defined = false;  // false when the marginal is below 1e-14
};

// g_j(eta) = integral of k over eta_j with the other coordinates fixed.
// eta[j] is ignored. The integrand is piecewise polynomial with computable
// kinks, so panels are integrated exactly by Gauss rules; the recorded error
// compares two rule orders and must stay below 1e-8 relative.
QuadResult marginal_density(const CommonDensity& cd, int j, const Eigen::VectorXd& eta);

// rho_j(eta) = k(eta) / g_j(eta).
ConditionalDensityReport conditional_density(const CommonDensity& cd, int j,
                                             const Eigen::VectorXd& eta);

// integral over R^L of |d k / d eta_j|. Computed in omega coordinates where
// the domain is the box (supp f)^L:
//   int |sum_m b_{m,j} f'(omega_m) prod_{k != m} f(omega_k)| d omega.
// Cells are refined where the signed sum changes sign; by construction the
// estimate never exceeds ||f'||_L1 * sum_k |b_{k,j}|.
QuadResult grad_density_integral(const CommonDensity& cd, int j);

// Normalization check: integral of k over its support, evaluated through the
// full eval path on the omega-box tensor grid (eta = A omega level sets).
QuadResult integrate_total(const CommonDensity& cd);

// sup over eta_j of k(eta) with the other coordinates fixed; eta[j] ignored.
double sup_over_coordinate(const CommonDensity& cd, int j, const Eigen::VectorXd& eta);

// Panel points (support ends and kinks) of t -> k(eta + t e_j) along
// coordinate j. Empty when the restriction vanishes identically.
std::vector<double> coordinate_panels(const CommonDensity& cd, int j, const Eigen::VectorXd& eta);

}  // namespace alloylab
