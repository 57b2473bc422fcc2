#pragma once

#include <array>
#include <cstdint>

#include "alloylab/errors.hpp"
#include "alloylab/lattice.hpp"

namespace alloylab {

// Uniform mesh on the box [0, l)^d with m points per unit cell per axis and
// periodic identification. Mesh point i has coordinate i * h, h = 1/m.
struct GridSpec {
  int dim = 1;
  int side = 1;  // box side l in unit cells
  int mesh = 8;  // points per unit cell per axis

  GridSpec() = default;
  GridSpec(int d, int l, int m) : dim(d), side(l), mesh(m) {
    if (d < 1 || d > 2) throw ConfigError("grid: dim must be 1 or 2");
    if (l < 1 || m < 1) throw ConfigError("grid: side and mesh must be >= 1");
    if (total_points() > 200000) throw SizeOverflow("grid: too many mesh points");
  }

  double h() const { return 1.0 / mesh; }
  std::int64_t points_per_axis() const { return static_cast<std::int64_t>(side) * mesh; }
  std::int64_t total_points() const {
    std::int64_t n = points_per_axis();
    return dim == 2 ? n * n : n;
  }

  // Flattened index <-> per-axis mesh coordinates (row-major, x fastest).
  std::array<std::int64_t, 2> unflatten(std::int64_t i) const {
    const std::int64_t na = points_per_axis();
    return dim == 2 ? std::array<std::int64_t, 2>{i % na, i / na}
                    : std::array<std::int64_t, 2>{i, 0};
  }
  std::int64_t flatten(std::int64_t x, std::int64_t y) const {
    const std::int64_t na = points_per_axis();
    return dim == 2 ? y * na + x : x;
  }

  // Unit cell containing mesh point i.
  LatticePoint cell_of(std::int64_t i) const {
    const auto xy = unflatten(i);
    return lattice_point(static_cast<int>(xy[0] / mesh), static_cast<int>(xy[1] / mesh));
  }
};

}  // namespace alloylab
