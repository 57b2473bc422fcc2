#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "alloylab/errors.hpp"

namespace alloylab {

// Lattice points and offsets in Z^d, d <= 2. For d = 1 the second component
// is fixed to zero so lexicographic ordering works uniformly.
using LatticePoint = std::array<int, 2>;

inline LatticePoint lattice_point(int x, int y = 0) { return {x, y}; }

inline LatticePoint operator-(const LatticePoint& a, const LatticePoint& b) {
  return {a[0] - b[0], a[1] - b[1]};
}

inline LatticePoint operator+(const LatticePoint& a, const LatticePoint& b) {
  return {a[0] + b[0], a[1] + b[1]};
}

// Finite family of offsets Gamma with real coefficients alpha_k. Must contain
// the zero offset with a nonzero coefficient. alpha_star() < |alpha0| is the
// admissibility condition; the type deliberately also represents
// non-admissible vectors such as (1, -1).
class ConvolutionVector {
 public:
  ConvolutionVector(int dim, std::vector<LatticePoint> offsets,
                    std::vector<double> coeffs);

  static ConvolutionVector one_d(std::vector<double> coeffs_from_zero);

  int dim() const { return dim_; }
  const std::vector<LatticePoint>& offsets() const { return offsets_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::size_t size() const { return offsets_.size(); }

  double alpha0() const { return alpha0_; }
  double alpha_star() const;
  bool admissible() const { return alpha_star() < std::abs(alpha0()); }

  // Coefficient at a given offset; zero if the offset is not in Gamma.
  double coeff_at(const LatticePoint& p) const;
  bool contains(const LatticePoint& p) const;

 private:
  int dim_;
  std::vector<LatticePoint> offsets_;
  std::vector<double> coeffs_;
  double alpha0_ = 0.0;
};

// The index box Lambda~ = Lambda cap Z^d (side l, based at the origin) and
// its enlargement Lambda+ = { lambda - gamma | lambda in Lambda~, gamma in
// Gamma }, both in deterministic lexicographic order.
class IndexBox {
 public:
  IndexBox(int dim, int side, const ConvolutionVector& alpha);

  int dim() const { return dim_; }
  int side() const { return side_; }
  const std::vector<LatticePoint>& lattice() const { return lattice_; }
  const std::vector<LatticePoint>& plus_set() const { return plus_; }
  std::size_t plus_size() const { return plus_.size(); }

  // Position of p in plus_set ordering, or -1 if absent.
  int index_of(const LatticePoint& p) const;
  // Position of p in lattice ordering, or -1 if absent.
  int lattice_index_of(const LatticePoint& p) const;

 private:
  int dim_;
  int side_;
  std::vector<LatticePoint> lattice_;
  std::vector<LatticePoint> plus_;
};

}  // namespace alloylab
