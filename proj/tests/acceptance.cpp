// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria capped at 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alloylab/common_density.hpp"
#include "alloylab/experiment.hpp"
#include "alloylab/msa.hpp"
#include "alloylab/runner.hpp"
#include "alloylab/spectral.hpp"
#include "alloylab/toeplitz.hpp"
#include "alloylab/wegner.hpp"
#include "test_support.hpp"

using namespace alloylab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[48];
  snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

ModelSpec wegner_model(std::vector<double> alpha = {1.0, -0.5}) {
  ModelSpec m = ModelSpec::standard_1d(std::move(alpha), 5);
  m.u.w.kappa = 6.0;
  return m;
}

// ---------------------------------------------------------------- criterion 1

Outcome criterion1() {
  Rng rng(20240901);
  testing::RandomAlphaOptions opt;
  double worst_residual = 0.0, worst_excess = -1e300;
  for (int c = 0; c < 1000; ++c) {
    opt.dim = 1 + static_cast<int>(rng.below(2));
    const auto alpha = testing::random_admissible_alpha(rng, opt);
    const int side = 2 + static_cast<int>(rng.below(15));  // 2..16
    const auto t = build_transform(alpha, IndexBox(opt.dim, side, alpha));
    const Eigen::Index n = static_cast<Eigen::Index>(t.size());
    worst_residual = std::max(
        worst_residual,
        (t.a * t.b - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
    const auto rep = verify_norm_bound(t, alpha);
    worst_excess = std::max(worst_excess, rep.actual - rep.bound);
  }
  const bool pass = worst_residual <= 1e-10 && worst_excess <= 1e-9;
  return {pass, "1000 sections, max |AB-I| = " + num(worst_residual) +
                    ", max (||B|| - bound) = " + num(worst_excess)};
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion2() {
  const auto alpha = ConvolutionVector::one_d({1.0, -1.0});
  for (int l = 2; l <= 64; ++l) {
    const auto t = build_transform(alpha, IndexBox(1, l, alpha));
    for (Eigen::Index j = 0; j < t.b.rows(); ++j)
      for (Eigen::Index k = 0; k < t.b.cols(); ++k)
        if (t.b(j, k) != (j >= k ? 1.0 : 0.0))
          return {false, "entry mismatch at l = " + std::to_string(l)};
    if (t.row_sum_norm_b != static_cast<double>(l + 1))
      return {false, "norm mismatch at l = " + std::to_string(l)};
  }
  return {true, "b_{jk} = [j >= k] and ||B_l|| = l + 1 exactly for l = 2..64"};
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion3() {
  const auto alpha = ConvolutionVector::one_d({1.0, -1.0});
  const DensityModel tri = DensityModel::triangular();
  double worst = 0.0;
  int checked = 0;
  for (int l = 2; l <= 8; ++l) {
    const IndexBox box(1, l, alpha);
    const CommonDensity cd(build_transform(alpha, box), tri);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(cd.size());
    for (int j = -1; j <= l - 1; ++j) {
      if ((l - j) % 2 != 0) continue;
      const auto rep = conditional_density(cd, box.index_of(lattice_point(j)), zero);
      if (!rep.defined) return {false, "undefined conditional at l=" + std::to_string(l)};
      worst = std::max(worst, std::abs(rep.rho - (l - j + 1)));
      ++checked;
    }
  }
  return {worst <= 1e-4, std::to_string(checked) +
                             " (l, j) pairs, max |rho - (l-j+1)| = " + num(worst)};
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion4() {
  const auto alpha = ConvolutionVector::one_d({1.0, -0.5});
  const IndexBox box(1, 6, alpha);
  const CommonDensity cd(build_transform(alpha, box), DensityModel::uniform());
  const int j = box.index_of(lattice_point(2));
  const int jn = box.index_of(lattice_point(3));
  double prev = 0.0, last = 0.0;
  for (int m = 1; m <= 10; ++m) {
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(cd.size());
    eta[jn] = 1.0 - std::pow(2.0, -m);
    const auto rep = conditional_density(cd, j, eta);
    if (!rep.defined || rep.rho <= prev)
      return {false, "not strictly increasing at m = " + std::to_string(m)};
    prev = last = rep.rho;
  }
  return {last > 100.0, "rho strictly increasing, rho(m=10) = " + num(last)};
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion5() {
  struct Instance {
    ConvolutionVector alpha;
    int side;
    DensityModel density;
  };
  const DensityModel tri = DensityModel::triangular();
  const DensityModel bump = DensityModel::smooth_bump(-0.5, 0.5);
  std::vector<Instance> instances;
  instances.push_back({ConvolutionVector::one_d({1.0}), 3, tri});
  instances.push_back({ConvolutionVector::one_d({1.0}), 6, tri});
  instances.push_back({ConvolutionVector::one_d({2.0}), 3, tri});
  instances.push_back({ConvolutionVector::one_d({1.0, -1.0}), 2, tri});
  instances.push_back({ConvolutionVector::one_d({1.0, -1.0}), 3, tri});
  instances.push_back({ConvolutionVector::one_d({1.0, -0.5}), 2, tri});
  instances.push_back({ConvolutionVector::one_d({1.0, -0.5}), 4, tri});
  instances.push_back(
      {ConvolutionVector(2, {lattice_point(0, 0), lattice_point(1, 0)}, {1.0, -0.4}), 2, tri});
  instances.push_back({ConvolutionVector::one_d({1.0}), 2, bump});
  instances.push_back({ConvolutionVector::one_d({1.0, -0.5}), 2, bump});

  double worst = -1e300;
  int checked = 0;
  for (const auto& inst : instances) {
    const IndexBox box(inst.alpha.dim(), inst.side, inst.alpha);
    const CommonDensity cd(build_transform(inst.alpha, box), inst.density);
    if (cd.size() > 6) return {false, "instance exceeds L = 6"};
    for (int j = 0; j < cd.size(); ++j) {
      double colsum = 0.0;
      for (int k = 0; k < cd.size(); ++k) colsum += std::abs(cd.transform().b(k, j));
      const auto r = grad_density_integral(cd, j);
      worst = std::max(worst, r.value - inst.density.fprime_l1() * colsum);
      ++checked;
    }
  }
  return {worst <= 1e-6, std::to_string(checked) +
                             " integrals, max (value - bound) = " + num(worst)};
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion6() {
  const ModelSpec model = ModelSpec::standard_1d({1.0, -0.5}, 8);
  int violations = 0, nontrivial = 0;
  for (int i = 0; i < 100; ++i) {
    const auto inst = make_random_spav_instance(model, 2, mix_seed(424242, 1000 + i));
    const auto rep = spectral_averaging_check(inst);
    if (!rep.holds) ++violations;
    if (rep.lhs > 0.0) ++nontrivial;
  }
  return {violations == 0, "100 instances, " + std::to_string(violations) +
                               " violations, " + std::to_string(nontrivial) + " non-vacuous"};
}

// ----------------------------------------------------------- criteria 7 and 8

struct WegnerOutcome {
  Outcome eps, vol;
  bool ran = false;
};

WegnerOutcome run_wegner_criteria() {
  WegnerSweepConfig config;
  config.model = wegner_model();
  config.epsilons = {0.64, 0.32, 0.16, 0.08, 0.04, 0.02, 0.01};
  config.box_sizes = {20, 40, 80};
  config.samples = 500;
  config.energy_percentile = 5.0;
  config.seed = 1;
  const auto sweep = run_wegner_sweep(config, 1);
  const auto fit = fit_scaling(sweep, 200, 1);

  WegnerOutcome out;
  out.ran = true;
  const bool eps_ok = std::abs(fit.slope_eps - 1.0) <= 0.15 && fit.ci_eps_lo <= 1.0 &&
                      1.0 <= fit.ci_eps_hi;
  out.eps = {eps_ok, "slope_eps = " + num(fit.slope_eps) + ", CI [" + num(fit.ci_eps_lo) +
                         ", " + num(fit.ci_eps_hi) + "], E = " + num(sweep.energy)};
  const bool vol_ok = std::abs(fit.slope_vol - 1.0) <= 0.2;
  out.vol = {vol_ok, "slope_vol = " + num(fit.slope_vol) + ", CI [" + num(fit.ci_vol_lo) +
                         ", " + num(fit.ci_vol_hi) + "], cells = " +
                         std::to_string(fit.cells_used)};
  return out;
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion9() {
  const ModelSpec model = wegner_model();
  const std::vector<int> sides = {20, 40, 80};
  const int samples = 300;

  std::map<int, std::vector<Eigen::VectorXd>> spectra;
  std::vector<double> pooled;
  for (int l : sides) {
    spectra[l] = sample_spectra(model, l, samples, mix_seed(9, l), 1);
    for (const auto& ev : spectra[l]) pooled.insert(pooled.end(), ev.data(), ev.data() + ev.size());
  }
  std::vector<double> energies = {percentile(pooled, 5.0), percentile(pooled, 10.0),
                                  percentile(pooled, 20.0)};

  Rng rng(1234);
  std::string detail;
  for (double e : energies) {
    std::vector<double> stds;
    std::vector<std::pair<double, double>> bands;
    for (int l : sides) {
      std::vector<double> values(samples);
      for (int i = 0; i < samples; ++i) {
        const auto& ev = spectra[l][i];
        values[i] = (std::lower_bound(ev.data(), ev.data() + ev.size(), e) - ev.data()) /
                    static_cast<double>(l);
      }
      stds.push_back(mean_std(values).std);
      std::vector<double> boot;
      for (int b = 0; b < 200; ++b) {
        std::vector<double> re(samples);
        for (int i = 0; i < samples; ++i) re[i] = values[rng.below(samples)];
        boot.push_back(mean_std(re).std);
      }
      bands.emplace_back(percentile(boot, 2.5), percentile(boot, 97.5));
    }
    for (std::size_t i = 0; i + 1 < stds.size(); ++i)
      if (stds[i + 1] >= stds[i])
        return {false, "std not strictly decreasing at E = " + num(e)};
    if (bands.back().second >= bands.front().first)
      return {false, "bootstrap bands overlap at E = " + num(e)};
    detail += " [E=" + num(e) + ": " + num(stds[0]) + " > " + num(stds[1]) + " > " +
              num(stds[2]) + "]";
  }
  return {true, "std(N) decreases l=20 -> 80 at 3 energies," + detail};
}

// --------------------------------------------------------------- criterion 10

Outcome criterion10() {
  double worst = 0.0;
  for (auto [side, mesh] : std::vector<std::pair<int, int>>{{4, 2}, {25, 4}, {64, 8}}) {
    const GridSpec grid(1, side, mesh);
    const auto h = assemble_hamiltonian(Eigen::VectorXd::Zero(grid.total_points()), grid);
    const auto s = eigenvalues(h);
    worst = std::max(worst,
                     (s.eigenvalues - free_laplacian_spectrum_1d(grid)).cwiseAbs().maxCoeff());
  }
  {
    const GridSpec grid(2, 6, 4);  // 24 x 24 mesh
    const auto h = assemble_hamiltonian(Eigen::VectorXd::Zero(grid.total_points()), grid);
    const auto s = eigenvalues(h);
    const auto branch = free_laplacian_spectrum_1d(GridSpec(1, 6, 4));
    std::vector<double> sums;
    sums.reserve(branch.size() * branch.size());
    for (int a = 0; a < branch.size(); ++a)
      for (int b = 0; b < branch.size(); ++b) sums.push_back(branch[a] + branch[b]);
    std::sort(sums.begin(), sums.end());
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
      worst = std::max(worst, std::abs(s.eigenvalues[i] - sums[i]));
  }
  return {worst <= 1e-10, "max |lambda - closed form| = " + num(worst) + " (d=1 n<=512, d=2)"};
}

// --------------------------------------------------------------- criterion 11

Outcome criterion11() {
  const ModelSpec base = ModelSpec::standard_1d({1.0, -0.5}, 4);
  std::vector<double> rates;
  for (int mesh : {4, 2}) {
    ModelSpec model = base;
    model.mesh = mesh;
    const auto decay = fit_goodbox_decay(model, 0.5, {6, 12, 18, 24});
    if (!(decay.rate > 0.0)) return {false, "nonpositive decay rate at mesh " + std::to_string(mesh)};
    rates.push_back(decay.rate);
  }
  const double rel = std::abs(rates[0] - rates[1]) / rates[0];
  return {rel <= 0.2, "rates " + num(rates[0]) + " (m=4) vs " + num(rates[1]) +
                          " (m=2), relative gap " + num(rel)};
}

// --------------------------------------------------------------- criterion 12

Outcome criterion12() {
  Rng rng(3141);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    ResolventIdentityInstance inst;
    const bool twod = c % 5 == 4;
    if (twod) {
      inst.model = ModelSpec{
          2, 2,
          SingleSitePotential(
              ConvolutionVector(2, {lattice_point(0, 0), lattice_point(1, 0)}, {1.0, -0.5}),
              BaseBump{}),
          BackgroundPotential{}, "triangular"};
      inst.big_side = 8 + static_cast<int>(rng.below(2));
      inst.sub_side = 5 + static_cast<int>(rng.below(2));
    } else {
      inst.model = ModelSpec::standard_1d({1.0, -0.5}, 4);
      inst.big_side = 9 + static_cast<int>(rng.below(6));
      inst.sub_side = 5 + static_cast<int>(rng.below(3));
    }
    const int room = inst.big_side - inst.sub_side;
    inst.sub_offset = lattice_point(
        static_cast<int>(rng.below(room + 1)),
        twod ? static_cast<int>(rng.below(room + 1)) : 0);
    inst.z = {rng.uniform(-2.0, 40.0), rng.uniform01() < 0.5 ? 0.1 : -0.25};
    inst.field_seed = rng.raw();
    inst.probe_seed = rng.raw();
    worst = std::max(worst, resolvent_identity_residual(inst));
  }
  return {worst <= 1e-8, "50 nested-box instances, max relative residual = " + num(worst)};
}

// --------------------------------------------------------------- criterion 13

Outcome criterion13() {
  const fs::path base = fs::temp_directory_path() / "alloylab_acceptance_det";
  fs::remove_all(base);

  auto run_and_hash = [&](const std::string& command, const nlohmann::json& config,
                          int workers, int tag) {
    RunOptions options;
    options.workers = workers;
    options.out_dir = (base / (command + std::to_string(tag))).string();
    const auto outcome = run_command(command, config, options);
    if (outcome.exit_code != 0) return std::string("RUNFAIL:" + outcome.summary);
    std::string all;
    for (const auto& name : outcome.outputs) {
      if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
      std::ifstream f(fs::path(outcome.run_dir) / name, std::ios::binary);
      std::ostringstream ss;
      ss << f.rdbuf();
      all += name + "\n" + ss.str();
    }
    return all;
  };

  nlohmann::json ids_config = {
      {"model",
       {{"dim", 1},
        {"mesh", 4},
        {"alpha", {{"coeffs_from_zero", {1.0, -0.5}}}},
        {"w", {{"kind", "indicator"}, {"kappa", 6.0}}},
        {"v0", {{"kind", "zero"}}}}},
      {"density", {{"family", "triangular"}}},
      {"grid", {{"box_sizes", {6, 10}}}},
      {"experiment", {{"samples", 40}, {"energy_percentiles", {10.0, 30.0}}, {"bootstrap", 50}}},
      {"seed", 3}};
  nlohmann::json wegner_config = default_config("wegner", true);

  int checked = 0;
  for (const auto& [command, config] :
       std::vector<std::pair<std::string, nlohmann::json>>{{"ids", ids_config},
                                                           {"wegner", wegner_config}}) {
    const std::string a = run_and_hash(command, config, 1, 0);
    const std::string b = run_and_hash(command, config, 3, 1);
    const std::string c = run_and_hash(command, config, 1, 2);
    if (a.rfind("RUNFAIL:", 0) == 0) return {false, command + " " + a};
    if (a != b || a != c)
      return {false, command + ": csv bytes differ across workers or reruns"};
    ++checked;
  }
  return {true, "ids and wegner CSV outputs bit-identical for workers {1, 3} and reruns"};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    std::string name;
    std::function<Outcome()> run;
    double budget_s;  // 0 = no stated budget
  };

  WegnerOutcome wegner;
  const auto wegner_lazy = [&]() {
    if (!wegner.ran) wegner = run_wegner_criteria();
  };

  std::vector<Entry> entries = {
      {1, "toeplitz norm bound over 1000 random admissible sections", criterion1, 60.0},
      {2, "example-1 inverse entries and norm, l = 2..64", criterion2, 60.0},
      {3, "conditional density rho(0) = l - j + 1", criterion3, 300.0},
      {4, "conditional density divergence probes", criterion4, 120.0},
      {5, "gradient integral column-sum bound", criterion5, 300.0},
      {6, "spectral averaging inequality, 100 instances", criterion6, 600.0},
      {7, "wegner epsilon scaling",
       [&]() {
         wegner_lazy();
         return wegner.eps;
       },
       600.0},
      {8, "wegner volume scaling",
       [&]() {
         wegner_lazy();
         return wegner.vol;
       },
       0.0},
      {9, "ids self-averaging", criterion9, 0.0},
      {10, "free laplacian closed forms", criterion10, 0.0},
      {11, "good-box decay rate, mesh stable", criterion11, 0.0},
      {12, "geometric resolvent identity residual", criterion12, 0.0},
      {13, "worker-count determinism of csv outputs", criterion13, 0.0},
  };

  int failures = 0;
  for (auto& entry : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (entry.budget_s > 0.0 && seconds > entry.budget_s) {
      outcome.pass = false;
      outcome.detail += " [over budget " + num(entry.budget_s) + " s]";
    }
    if (!outcome.pass) ++failures;
    printf("[%s] C%-2d %s: %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", entry.id,
           entry.name.c_str(), outcome.detail.c_str(), seconds);
    fflush(stdout);
  }
  printf("%d/13 criteria passed\n", 13 - failures);
  return failures == 0 ? 0 : 1;
}
