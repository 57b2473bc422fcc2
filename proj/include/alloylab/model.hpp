#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "alloylab/density.hpp"
#include "alloylab/errors.hpp"
#include "alloylab/grid.hpp"
#include "alloylab/lattice.hpp"

namespace alloylab {

// Base bump w >= kappa on [0,1)^d: either the plain indicator kappa * chi or
// a step function on an s^d subcell grid with all values >= kappa > 0.
struct BaseBump {
  enum class Kind { Indicator, SubcellStep };
  Kind kind = Kind::Indicator;
  double kappa = 1.0;
  int subcells = 1;
  std::vector<double> values;  // s^d values, row-major, for SubcellStep

  // value at the fractional position (fx, fy) in [0,1)^2
  double value(double fx, double fy, int dim) const {
    if (kind == Kind::Indicator) return kappa;
    const int sx = std::min(subcells - 1, static_cast<int>(fx * subcells));
    const int sy = dim == 2 ? std::min(subcells - 1, static_cast<int>(fy * subcells)) : 0;
    return values[sy * subcells + sx];
  }

  void validate(int dim) const {
    if (kappa <= 0.0) throw ConfigError("base bump: kappa must be positive");
    if (kind == Kind::SubcellStep) {
      const std::size_t expected = dim == 2 ? static_cast<std::size_t>(subcells) * subcells
                                            : static_cast<std::size_t>(subcells);
      if (subcells < 1 || values.size() != expected)
        throw ConfigError("base bump: subcell values size mismatch");
      for (double v : values)
        if (v < kappa) throw ConfigError("base bump: subcell value below kappa");
    }
  }
};

// Generalized step function u(x) = sum_{k in Gamma} alpha_k w(x - k).
struct SingleSitePotential {
  ConvolutionVector alpha;
  BaseBump w;

  SingleSitePotential(ConvolutionVector a, BaseBump bump)
      : alpha(std::move(a)), w(bump) {
    w.validate(alpha.dim());
  }
};

// Z^d-periodic background V_0.
struct BackgroundPotential {
  enum class Kind { Zero, Cosine };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;

  double value(double x, double y, int dim) const {
    if (kind == Kind::Zero) return 0.0;
    double v = amplitude * std::cos(2.0 * M_PI * x);
    if (dim == 2) v += amplitude * std::cos(2.0 * M_PI * y);
    return v;
  }
};

// Everything that fixes the random operator family apart from the box size.
struct ModelSpec {
  int dim = 1;
  int mesh = 8;
  SingleSitePotential u;
  BackgroundPotential v0;
  std::string density_id = "triangular";

  DensityModel density() const { return DensityModel::by_id(density_id); }
  GridSpec grid(int side) const { return GridSpec(dim, side, mesh); }

  static ModelSpec standard_1d(std::vector<double> alpha_coeffs, int mesh = 8,
                               const std::string& density = "triangular") {
    ModelSpec m{1, mesh,
                SingleSitePotential(ConvolutionVector::one_d(std::move(alpha_coeffs)), BaseBump{}),
                BackgroundPotential{}, density};
    return m;
  }
};

}  // namespace alloylab
