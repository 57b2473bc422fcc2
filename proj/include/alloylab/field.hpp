#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "alloylab/density.hpp"
#include "alloylab/lattice.hpp"

namespace alloylab {

// Realization of the coupling constants on Lambda+, in plus_set order.
// Regeneration from (seed, density id, box) is bit-reproducible.
struct CouplingField {
  IndexBox box;
  Eigen::VectorXd values;
  std::uint64_t seed = 0;
  std::string density_id;
};

// iid samples from `density` at every site of box.plus_set().
CouplingField sample_field(const DensityModel& density, const IndexBox& box,
                           std::uint64_t seed);

// Field frozen at a constant value (zero-disorder runs).
CouplingField constant_field(const IndexBox& box, double value);

}  // namespace alloylab
