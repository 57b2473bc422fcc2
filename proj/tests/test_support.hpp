#pragma once

#include <set>
#include <vector>

#include "alloylab/lattice.hpp"
#include "alloylab/rng.hpp"

namespace alloylab::testing {

struct RandomAlphaOptions {
  int dim = 1;
  int max_offsets = 5;
  int offset_range = 2;     // offsets drawn from [-range, range]^d
  double max_ratio = 0.95;  // alpha* / |alpha0|
};

inline ConvolutionVector random_admissible_alpha(Rng& rng, const RandomAlphaOptions& opt) {
  const int span = 2 * opt.offset_range + 1;
  const int pool = opt.dim == 2 ? span * span : span;
  const int want = std::min(pool, 1 + static_cast<int>(rng.below(opt.max_offsets)));
  std::set<LatticePoint> offsets{lattice_point(0, 0)};
  while (static_cast<int>(offsets.size()) < want) {
    const int ox = static_cast<int>(rng.below(span)) - opt.offset_range;
    const int oy = opt.dim == 2 ? static_cast<int>(rng.below(span)) - opt.offset_range : 0;
    offsets.insert(lattice_point(ox, oy));
  }
  const double alpha0 = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.uniform01());
  const double ratio = opt.max_ratio * rng.uniform01();
  std::vector<LatticePoint> offv(offsets.begin(), offsets.end());
  std::vector<double> coeffs(offv.size(), 0.0);
  double raw = 0.0;
  for (std::size_t i = 0; i < offv.size(); ++i) {
    if (offv[i] == lattice_point(0, 0)) {
      coeffs[i] = alpha0;
    } else {
      coeffs[i] = rng.uniform(-1.0, 1.0);
      raw += std::abs(coeffs[i]);
    }
  }
  if (raw > 0.0)
    for (std::size_t i = 0; i < offv.size(); ++i)
      if (!(offv[i] == lattice_point(0, 0))) coeffs[i] *= ratio * std::abs(alpha0) / raw;
  return ConvolutionVector(opt.dim, offv, coeffs);
}

}  // namespace alloylab::testing
