#include "alloylab/field.hpp"

#include "alloylab/rng.hpp"

namespace alloylab {

CouplingField sample_field(const DensityModel& density, const IndexBox& box,
                           std::uint64_t seed) {
  CouplingField f{box, Eigen::VectorXd(box.plus_size()), seed, density.id()};
  Rng rng(seed);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = density.sample(rng);
  return f;
}

CouplingField constant_field(const IndexBox& box, double value) {
  CouplingField f{box, Eigen::VectorXd::Constant(box.plus_size(), value), 0, "constant"};
  return f;
}

}  // namespace alloylab
