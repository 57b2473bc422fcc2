#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "alloylab/spectral.hpp"
#include "alloylab/wegner.hpp"
#include "test_support.hpp"

using namespace alloylab;

namespace {

ModelSpec strong_model(std::vector<double> alpha = {1.0, -0.5}) {
  ModelSpec m = ModelSpec::standard_1d(std::move(alpha), 5);
  m.u.w.kappa = 6.0;
  return m;
}

WegnerSweepConfig smoke_sweep() {
  WegnerSweepConfig config;
  config.model = strong_model();
  config.epsilons = {0.64, 0.32, 0.16, 0.08, 0.04, 0.02, 0.01};
  config.box_sizes = {10, 14, 20};
  config.samples = 120;
  config.seed = 3;
  return config;
}

}  // namespace

TEST_CASE("expected trace trivial regimes") {
  const ModelSpec model = strong_model();
  // empty interval
  const auto zero_eps = expected_trace(model, -20.0, 0.0, 8, 20, 4);
  CHECK(zero_eps.mean == 0.0);
  // E far below the spectrum: V is bounded by kappa (|a0| + a*) / 2, so the
  // spectrum stays above -9/2 and [E - eps, E] at E = -20 is empty
  const auto below = expected_trace(model, -20.0, 1.0, 8, 20, 4);
  CHECK(below.mean == 0.0);
}

TEST_CASE("expected trace: determinism and linearity ratio") {
  const ModelSpec model = strong_model();
  // pilot percentile for a band-edge energy
  const auto spectra = sample_spectra(model, 20, 60, 11);
  std::vector<double> pooled;
  for (const auto& ev : spectra) pooled.insert(pooled.end(), ev.data(), ev.data() + ev.size());
  const double e = percentile(pooled, 5.0);

  const auto once = expected_trace(model, e, 0.16, 20, 300, 77);
  const auto twice = expected_trace(model, e, 0.16, 20, 300, 77);
  CHECK(once.mean == twice.mean);  // bit identical under one seed

  const auto doubled = expected_trace(model, e, 0.32, 20, 300, 77);
  const double ratio = doubled.mean / once.mean;
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.4);
}

TEST_CASE("sweep cells are monotone in eps and seed deterministic") {
  const auto config = smoke_sweep();
  const auto sweep = run_wegner_sweep(config, 2);
  for (int l : sweep.box_sizes) {
    const auto& counts = sweep.counts.at(l);
    for (int i = 0; i < counts.rows(); ++i)
      for (int e = 1; e < counts.cols(); ++e)
        CHECK(counts(i, e) <= counts(i, e - 1));  // epsilons stored decreasing
  }
  const auto again = run_wegner_sweep(config, 1);
  CHECK(again.energy == sweep.energy);
  for (int l : sweep.box_sizes)
    CHECK((sweep.counts.at(l) - again.counts.at(l)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scaling fit on the smoke sweep") {
  const auto sweep = run_wegner_sweep(smoke_sweep(), 2);
  const auto fit = fit_scaling(sweep, 120, 5);
  CHECK(fit.slope_eps > 0.6);
  CHECK(fit.slope_eps < 1.4);
  CHECK(fit.ci_eps_lo <= fit.slope_eps);
  CHECK(fit.ci_eps_hi >= fit.slope_eps);
  CHECK(fit.wegner_constant > 0.0);
  CHECK(fit.r_squared > 0.8);
  CHECK(fit.cells_used >= 3);
  // admissible alpha: the inverse norms stay bounded, q ~ 0
  CHECK(std::abs(fit.q_norm_growth) < 0.05);
  CHECK(fit.bound_volume_exponent == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("classical nonnegative single site potential: eps slope near 1") {
  WegnerSweepConfig config;
  config.model = strong_model({1.0});  // Gamma = {0}
  config.epsilons = {0.64, 0.32, 0.16, 0.08, 0.04, 0.02};
  config.box_sizes = {12, 18, 27};
  config.samples = 260;
  config.seed = 14;
  const auto fit = fit_scaling(run_wegner_sweep(config, 2), 150, 14);
  CHECK(std::abs(fit.slope_eps - 1.0) <= 0.2);
  CHECK(fit.ci_eps_lo <= 1.0);
  CHECK(fit.ci_eps_hi >= 1.0);
}

TEST_CASE("example 1 sweep stays below the proven volume exponent") {
  WegnerSweepConfig config;
  config.model = strong_model({1.0, -1.0});
  config.epsilons = {0.64, 0.32, 0.16, 0.08, 0.04};
  config.box_sizes = {10, 20, 40};
  config.samples = 120;
  config.seed = 6;
  const auto sweep = run_wegner_sweep(config, 2);
  const auto fit = fit_scaling(sweep, 120, 6);
  // ||B_l|| = l + 1 gives q ~ 1 and the proven trace bound scales like l^2
  CHECK(fit.q_norm_growth == doctest::Approx(1.0).epsilon(0.1));
  CHECK(fit.bound_volume_exponent == doctest::Approx(2.0).epsilon(0.15));
  CHECK(fit.slope_vol <= 2.0 + 0.2);
}

TEST_CASE("sweep config validation") {
  WegnerSweepConfig config = smoke_sweep();
  config.epsilons = {0.1, 0.2};
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = smoke_sweep();
  config.epsilons[1] = -0.5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = smoke_sweep();
  config.samples = 1;
  CHECK_THROWS_AS(config.validate(), ConfigError);

  auto sweep = run_wegner_sweep(smoke_sweep(), 2);
  sweep.samples = 99;
  CHECK_THROWS_AS(fit_scaling(sweep, 50, 1), InsufficientData);
}

TEST_CASE("spectral averaging: trivial and random instances") {
  const ModelSpec model = ModelSpec::standard_1d({1.0, -0.5}, 8);

  // interval below the whole spectrum: lhs = 0 <= rhs
  SpavInstance inst = make_random_spav_instance(model, 2, 41);
  inst.i_lo = -30.0;
  inst.i_hi = -29.0;
  const auto trivial = spectral_averaging_check(inst);
  CHECK(trivial.lhs == 0.0);
  CHECK(trivial.holds);

  int nontrivial = 0;
  for (int i = 0; i < 12; ++i) {
    const auto random_inst = make_random_spav_instance(model, 2, 100 + i);
    const auto rep = spectral_averaging_check(random_inst);
    CHECK(rep.holds);
    CHECK(rep.lhs >= 0.0);
    if (rep.lhs > 0.0) ++nontrivial;
  }
  CHECK(nontrivial >= 6);  // anchored intervals keep the check non-vacuous

  SpavInstance bad = make_random_spav_instance(model, 2, 900);
  bad.phi *= 2.0;
  CHECK_THROWS_AS(spectral_averaging_check(bad), ConfigError);
}

TEST_CASE("spectral averaging with the whole spectral range reduces to the marginal") {
  // phi supported in cell j and I covering every eigenvalue make
  // s(eta) = ||phi_cell||^2 = 1, so the lhs collapses to the marginal g_j
  const ModelSpec model = ModelSpec::standard_1d({1.0, -0.5}, 8);
  const GridSpec grid = model.grid(2);
  const IndexBox box(1, 2, model.u.alpha);
  SpavInstance inst = make_random_spav_instance(model, 2, 77);
  inst.site = lattice_point(1);
  inst.phi = Eigen::VectorXd::Zero(grid.total_points());
  for (std::int64_t i = 0; i < grid.total_points(); ++i)
    if (grid.cell_of(i) == inst.site) inst.phi[i] = 1.0;
  inst.phi.normalize();
  inst.i_lo = -50.0;
  inst.i_hi = 400.0;  // beyond 4/h^2 + ||V||_inf

  const auto rep = spectral_averaging_check(inst);
  CHECK(rep.holds);
  const CommonDensity cd(build_transform(model.u.alpha, box), model.density());
  const auto g = marginal_density(cd, box.index_of(inst.site), inst.eta);
  CHECK(rep.lhs == doctest::Approx(g.value).epsilon(1e-5));
}

TEST_CASE("main estimate: identity transform and random instances") {
  const ModelSpec identity = ModelSpec::standard_1d({1.0}, 8);
  MainEstimateInstance inst = make_random_main_estimate_instance(identity, 3, 300, 8);
  const auto rep = main_estimate_check(inst, 2);
  // ||B|| = 1 for the identity transform
  CHECK(rep.rhs == doctest::Approx((inst.i_hi - inst.i_lo) * 4.0).epsilon(1e-12));
  CHECK(rep.holds);

  const ModelSpec model = ModelSpec::standard_1d({1.0, -0.5}, 8);
  for (int i = 0; i < 3; ++i) {
    const auto random_inst = make_random_main_estimate_instance(model, 2, 300, 50 + i);
    CHECK(main_estimate_check(random_inst, 2).holds);
  }

  MainEstimateInstance empty = make_random_main_estimate_instance(model, 2, 50, 5);
  empty.i_lo = -40.0;
  empty.i_hi = -39.5;
  const auto zero = main_estimate_check(empty, 1);
  CHECK(zero.lhs_mean == 0.0);
  CHECK(zero.holds);

  ModelSpec uniform_model = ModelSpec::standard_1d({1.0, -0.5}, 8, "uniform");
  MainEstimateInstance bad = make_random_main_estimate_instance(model, 2, 50, 5);
  bad.model = uniform_model;
  CHECK_THROWS_AS(main_estimate_check(bad, 1), NotDifferentiable);
}
