#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "alloylab/spectral.hpp"
#include "test_support.hpp"

using namespace alloylab;

namespace {

SpectralSummary summary_from(std::vector<double> ev, int side = 1, int dim = 1) {
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(ev.data(), ev.size());
  return SpectralSummary{v, GridSpec(dim, side, 1), 0};
}

DiscreteHamiltonian random_instance(std::uint64_t seed, int side = 5, int mesh = 4) {
  const ModelSpec model = ModelSpec::standard_1d({1.0, -0.5}, mesh);
  return assemble_from_seed(model, side, seed);
}

}  // namespace

TEST_CASE("one point box: the operator is the scalar potential value") {
  const GridSpec grid(1, 1, 1);
  const auto h = assemble_hamiltonian(Eigen::VectorXd::Constant(1, 3.25), grid);
  const auto s = eigenvalues(h);
  REQUIRE(s.eigenvalues.size() == 1);
  CHECK(s.eigenvalues[0] == doctest::Approx(3.25));
}

TEST_CASE("counting uses strict < and box-volume normalization") {
  const GridSpec grid(1, 4, 2);
  const auto h = assemble_hamiltonian(Eigen::VectorXd::Zero(grid.total_points()), grid);
  const auto s = eigenvalues(h);
  CHECK(counting(s, s.eigenvalues[0] - 1.0) == 0.0);
  CHECK(counting(s, s.eigenvalues[s.eigenvalues.size() - 1] + 1.0) ==
        doctest::Approx(grid.total_points() / 4.0));
  // fourier oracle: eigenvalues below 2/h^2 = 8 are {0, 2.343, 2.343}, the
  // k = +-2 pair sits at 8 itself
  CHECK(counting(s, 8.0 - 1e-9) == doctest::Approx(3.0 / 4.0));
  CHECK(counting(s, 8.0 + 1e-9) == doctest::Approx(5.0 / 4.0));
  // strictness: at an exact eigenvalue the state itself is not counted
  const auto exact = summary_from({0.0, 1.0, 2.0}, 1);
  CHECK(counting(exact, 1.0) == 1.0);
  CHECK(counting(exact, 1.0 + 1e-12) == 2.0);
}

TEST_CASE("trace projection over closed intervals") {
  const auto s = summary_from({0.0, 1.0, 1.0, 2.0, 3.0});
  CHECK(trace_projection(s, 0.5, 0.75) == 0);       // gap
  CHECK(trace_projection(s, -10.0, 10.0) == 5);     // everything
  CHECK(trace_projection(s, 1.0, 1.0) == 2);        // endpoint ties included
  CHECK(trace_projection(s, 1.0, 2.0) == 3);
  // additivity over abutting intervals double counts the shared endpoint
  CHECK(trace_projection(s, 0.0, 1.0) + trace_projection(s, 1.0, 3.0) ==
        trace_projection(s, 0.0, 3.0) + 2);
  CHECK_THROWS_AS(trace_projection(s, 2.0, 1.0), ConfigError);

  // free laplacian: interval covering exactly the k = +-1 modes
  const GridSpec grid(1, 4, 2);
  const auto free = eigenvalues(assemble_hamiltonian(Eigen::VectorXd::Zero(8), grid));
  CHECK(trace_projection(free, 1.0, 3.0) == 2);
}

TEST_CASE("counting consistency identity with trace projection") {
  Rng rng(3);
  for (int rep = 0; rep < 8; ++rep) {
    const auto s = eigenvalues(random_instance(rng.raw()));
    const double e = s.eigenvalues[rng.below(s.eigenvalues.size())] + rng.uniform(-0.5, 0.5);
    const double eps = rng.uniform01();
    const double delta = 1e-9;
    const double vol = s.box_volume();
    const long lhs = trace_projection(s, e - eps, e);
    const long rhs = std::lround(vol * (counting(s, e + delta) - counting(s, e - eps - delta)));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("eigen residuals stay below 1e-8 of the operator norm") {
  const auto h = random_instance(12345, 6, 4);
  Eigen::MatrixXd dense(h.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  REQUIRE(solver.info() == Eigen::Success);
  const double scale = dense.cwiseAbs().rowwise().sum().maxCoeff();
  Rng rng(9);
  for (int probe = 0; probe < 10; ++probe) {
    const Eigen::Index i = rng.below(dense.rows());
    const Eigen::VectorXd v = solver.eigenvectors().col(i);
    const double lambda = solver.eigenvalues()[i];
    CHECK((dense * v - lambda * v).norm() <= 1e-8 * scale);
  }
}

TEST_CASE("inertia slicing agrees with the dense path") {
  Rng rng(17);
  for (int rep = 0; rep < 6; ++rep) {
    const auto h = random_instance(rng.raw(), 6, 4);
    const auto s = eigenvalues(h);
    const double e1 = rng.uniform(-1.0, 20.0);
    const double e2 = e1 + rng.uniform01() * 10.0;
    CHECK(count_below_inertia(h, e1) ==
          std::lower_bound(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size(), e1) -
              s.eigenvalues.data());
    CHECK(trace_projection_inertia(h, e1, e2) == trace_projection(s, e1, e2));
  }
  // the free laplacian is exactly singular at E = 0
  const GridSpec grid(1, 4, 2);
  const auto h0 = assemble_hamiltonian(Eigen::VectorXd::Zero(grid.total_points()), grid);
  CHECK_THROWS_AS(count_below_inertia(h0, 0.0), EnergyResonant);
}

TEST_CASE("ids estimate: zero disorder, degenerate samples, determinism") {
  IdsConfig config;
  config.model = ModelSpec::standard_1d({1.0, -0.5}, 4);
  config.side = 6;
  config.samples = 8;
  config.seed = 5;
  config.energies = {0.5, 2.0, 8.0};

  IdsConfig frozen = config;
  frozen.frozen_coupling = 0.25;
  const auto zero_disorder = ids_estimate(frozen);
  for (double s : zero_disorder.std_n) CHECK(s == 0.0);
  for (std::size_t e = 0; e + 1 < zero_disorder.energies.size(); ++e)
    CHECK(zero_disorder.mean_n[e] <= zero_disorder.mean_n[e + 1]);

  IdsConfig single = config;
  single.samples = 1;
  const auto one = ids_estimate(single);
  CHECK_FALSE(one.std_defined);
  CHECK(std::isnan(one.std_n[0]));

  const auto a = ids_estimate(config, 1);
  const auto b = ids_estimate(config, 3);
  CHECK((a.raw - b.raw).cwiseAbs().maxCoeff() == 0.0);  // worker count invariant
  for (int e = 0; e < 3; ++e) {
    CHECK(a.mean_n[e] >= 0.0);
    CHECK(a.mean_n[e] <= std::pow(config.model.mesh, config.model.dim));
  }
}

TEST_CASE("percentile interpolation") {
  CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 0.0) == 1.0);
  CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 100.0) == 4.0);
  CHECK(percentile({4.0, 1.0, 3.0, 2.0}, 50.0) == doctest::Approx(2.5));
  CHECK_THROWS_AS(percentile({}, 50.0), InsufficientData);
}
