#include "alloylab/lattice.hpp"

#include <set>
#include <string>

namespace alloylab {

ConvolutionVector::ConvolutionVector(int dim, std::vector<LatticePoint> offsets,
                                     std::vector<double> coeffs)
    : dim_(dim), offsets_(std::move(offsets)), coeffs_(std::move(coeffs)) {
  if (dim_ < 1 || dim_ > 2)
    throw ConfigError("convolution vector: dim must be 1 or 2");
  if (offsets_.size() != coeffs_.size() || offsets_.empty())
    throw ConfigError("convolution vector: offsets/coeffs size mismatch");
  bool has_zero = false;
  std::set<LatticePoint> seen;
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    if (dim_ == 1 && offsets_[i][1] != 0)
      throw ConfigError("convolution vector: 1-d offset with nonzero second component");
    if (!seen.insert(offsets_[i]).second)
      throw ConfigError("convolution vector: duplicate offset");
    if (offsets_[i] == lattice_point(0, 0)) {
      has_zero = true;
      alpha0_ = coeffs_[i];
    }
  }
  if (!has_zero || alpha0_ == 0.0)
    throw ConfigError("convolution vector: needs offset 0 with nonzero coefficient");
}

ConvolutionVector ConvolutionVector::one_d(std::vector<double> coeffs_from_zero) {
  std::vector<LatticePoint> offsets;
  for (int i = 0; i < static_cast<int>(coeffs_from_zero.size()); ++i)
    offsets.push_back(lattice_point(i));
  return ConvolutionVector(1, std::move(offsets), std::move(coeffs_from_zero));
}

double ConvolutionVector::alpha_star() const {
  double s = 0.0;
  for (std::size_t i = 0; i < offsets_.size(); ++i)
    if (!(offsets_[i] == lattice_point(0, 0))) s += std::abs(coeffs_[i]);
  return s;
}

double ConvolutionVector::coeff_at(const LatticePoint& p) const {
  for (std::size_t i = 0; i < offsets_.size(); ++i)
    if (offsets_[i] == p) return coeffs_[i];
  return 0.0;
}

bool ConvolutionVector::contains(const LatticePoint& p) const {
  for (const auto& o : offsets_)
    if (o == p) return true;
  return false;
}

IndexBox::IndexBox(int dim, int side, const ConvolutionVector& alpha)
    : dim_(dim), side_(side) {
  if (dim != alpha.dim()) throw ConfigError("index box: dimension mismatch");
  if (side < 1) throw ConfigError("index box: side must be >= 1");
  const int ny = (dim_ == 2) ? side_ : 1;
  for (int x = 0; x < side_; ++x)
    for (int y = 0; y < ny; ++y) lattice_.push_back(lattice_point(x, y));
  std::sort(lattice_.begin(), lattice_.end());

  std::set<LatticePoint> plus;
  for (const auto& lam : lattice_)
    for (const auto& gam : alpha.offsets()) plus.insert(lam - gam);
  plus_.assign(plus.begin(), plus.end());
  std::sort(plus_.begin(), plus_.end());
}

int IndexBox::index_of(const LatticePoint& p) const {
  auto it = std::lower_bound(plus_.begin(), plus_.end(), p);
  if (it == plus_.end() || !(*it == p)) return -1;
  return static_cast<int>(it - plus_.begin());
}

int IndexBox::lattice_index_of(const LatticePoint& p) const {
  auto it = std::lower_bound(lattice_.begin(), lattice_.end(), p);
  if (it == lattice_.end() || !(*it == p)) return -1;
  return static_cast<int>(it - lattice_.begin());
}

}  // namespace alloylab
