#include "alloylab/wegner.hpp"

#include <algorithm>
#include <cmath>

#include "alloylab/experiment.hpp"
#include "alloylab/quadrature.hpp"
#include "alloylab/rng.hpp"
#include "alloylab/toeplitz.hpp"

namespace alloylab {

void WegnerSweepConfig::validate() const {
  if (epsilons.empty() || box_sizes.empty()) throw ConfigError("wegner sweep: empty grid");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (epsilons[i] <= 0.0) throw ConfigError("wegner sweep: epsilons must be positive");
    if (i > 0 && epsilons[i] >= epsilons[i - 1])
      throw ConfigError("wegner sweep: epsilons must be decreasing");
  }
  for (int l : box_sizes)
    if (l < 2) throw ConfigError("wegner sweep: box sizes must be >= 2");
  if (samples < 2) throw ConfigError("wegner sweep: needs samples >= 2");
}

namespace {

long count_in_interval(const Eigen::VectorXd& sorted, double e1, double e2) {
  const double* begin = sorted.data();
  const double* end = begin + sorted.size();
  return (std::upper_bound(begin, end, e2) - begin) - (std::lower_bound(begin, end, e1) - begin);
}

}  // namespace

WegnerSweepResult run_wegner_sweep(const WegnerSweepConfig& config, int workers) {
  config.validate();
  WegnerSweepResult out;
  out.epsilons = config.epsilons;
  out.box_sizes = config.box_sizes;
  out.dim = config.model.dim;
  out.seed = config.seed;
  out.samples = config.samples;

  const int neps = static_cast<int>(config.epsilons.size());
  std::map<int, std::vector<Eigen::VectorXd>> spectra;
  std::vector<double> pooled;
  for (int l : config.box_sizes) {
    spectra[l] = sample_spectra(config.model, l, config.samples,
                                mix_seed(config.seed, static_cast<std::uint64_t>(l)), workers);
    for (const auto& ev : spectra[l]) pooled.insert(pooled.end(), ev.data(), ev.data() + ev.size());
    out.transform_row_norms.push_back(
        build_transform(config.model.u.alpha, IndexBox(config.model.dim, l, config.model.u.alpha))
            .row_sum_norm_b);
  }
  out.energy = config.energy ? *config.energy : percentile(pooled, config.energy_percentile);

  for (int l : config.box_sizes) {
    Eigen::MatrixXd counts(config.samples, neps);
    for (int i = 0; i < config.samples; ++i)
      for (int e = 0; e < neps; ++e)
        counts(i, e) = static_cast<double>(
            count_in_interval(spectra[l][i], out.energy - config.epsilons[e], out.energy));
    out.counts[l] = std::move(counts);
  }

  for (int li = 0; li < static_cast<int>(config.box_sizes.size()); ++li) {
    const int l = config.box_sizes[li];
    const Eigen::MatrixXd& counts = out.counts[l];
    std::vector<SweepCell> col(neps);
    for (int e = 0; e < neps; ++e) {
      std::vector<double> v(counts.col(e).data(), counts.col(e).data() + config.samples);
      const MeanStd ms = mean_std(v);
      SweepCell& cell = col[e];
      cell.side = l;
      cell.eps = config.epsilons[e];
      cell.samples = config.samples;
      cell.mean = ms.mean;
      cell.half_width = ms.half_width;
      cell.events = ms.mean * config.samples;
      if (cell.mean == 0.0) {
        cell.valid = false;
        cell.flag = "empty";
      } else if (cell.events < config.spacing_multiple) {
        // pooled interval count below the spacing threshold: the probed
        // window is not resolved by the sampled spectra
        cell.valid = false;
        cell.flag = "below-spacing";
      }
    }
    // curvature: walk octave pairs from small eps upward; once the ratio
    // mean(2 eps)/mean(eps) leaves 2 (1 +- tol), that cell and all larger
    // eps are outside the linear window. Pairs are only tested when both
    // cells are resolved, an unresolved partner would poison the ratio.
    bool curved = false;
    for (int e = neps - 1; e >= 0; --e) {  // epsilons are stored decreasing
      if (!curved) {
        int partner = -1;
        for (int e2 = 0; e2 < neps; ++e2)
          if (std::abs(config.epsilons[e2] - 0.5 * config.epsilons[e]) <
              1e-9 * config.epsilons[e])
            partner = e2;
        if (partner >= 0 && col[partner].events >= config.spacing_multiple &&
            col[e].events >= config.spacing_multiple) {
          const double ratio = col[e].mean / col[partner].mean;
          if (std::abs(0.5 * ratio - 1.0) > config.curvature_tolerance) curved = true;
        }
      }
      if (curved && col[e].valid) {
        col[e].valid = false;
        col[e].flag = "curved";
      }
    }
    for (auto& cell : col) out.cells.push_back(cell);
  }
  return out;
}

TraceStats expected_trace(const ModelSpec& model, double energy, double eps, int side,
                          int samples, std::uint64_t seed, int workers) {
  if (samples < 1) throw InsufficientData("expected_trace: needs samples >= 1");
  if (eps < 0.0) throw ConfigError("expected_trace: eps must be >= 0");
  const auto spectra = sample_spectra(model, side, samples, seed, workers);
  std::vector<double> counts(samples);
  for (int i = 0; i < samples; ++i)
    counts[i] = static_cast<double>(count_in_interval(spectra[i], energy - eps, energy));
  const MeanStd ms = mean_std(counts);
  return {ms.mean, ms.half_width};
}

namespace {

struct FitRows {
  std::vector<double> log_eps, log_l, log_mean;
};

struct PlainFit {
  double slope_eps = 0.0, slope_vol = 0.0, intercept = 0.0, r_squared = 0.0;
};

bool fit_ok(const FitRows& rows) {
  if (rows.log_mean.size() < 3) return false;
  auto distinct = [](const std::vector<double>& v) {
    std::vector<double> c = v;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c.size();
  };
  return distinct(rows.log_eps) >= 2 && distinct(rows.log_l) >= 2;
}

PlainFit least_squares(const FitRows& rows) {
  const int n = static_cast<int>(rows.log_mean.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rows.log_eps[i];
    x(i, 2) = rows.log_l[i];
    y[i] = rows.log_mean[i];
  }
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  PlainFit fit;
  fit.intercept = beta[0];
  fit.slope_eps = beta[1];
  fit.slope_vol = beta[2];
  const double mean_y = y.mean();
  const double ss_tot = (y.array() - mean_y).square().sum();
  const double ss_res = (y - x * beta).array().square().sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace

ScalingFitResult fit_scaling(const WegnerSweepResult& sweep, int bootstrap,
                             std::uint64_t bootstrap_seed) {
  if (sweep.epsilons.size() < 3 || sweep.box_sizes.size() < 3)
    throw InsufficientData("fit_scaling: needs >= 3 epsilons and >= 3 box sizes");
  if (sweep.samples < 100) throw InsufficientData("fit_scaling: needs >= 100 samples");

  struct CellRef {
    int side;
    int eps_index;
    double eps;
  };
  FitRows rows;
  std::vector<CellRef> refs;
  ScalingFitResult out;
  for (const auto& cell : sweep.cells) {
    if (!cell.valid || cell.mean <= 0.0) continue;
    rows.log_eps.push_back(std::log(cell.eps));
    rows.log_l.push_back(std::log(static_cast<double>(cell.side)));
    rows.log_mean.push_back(std::log(cell.mean));
    int eps_index = -1;
    for (std::size_t e = 0; e < sweep.epsilons.size(); ++e)
      if (sweep.epsilons[e] == cell.eps) eps_index = static_cast<int>(e);
    refs.push_back({cell.side, eps_index, cell.eps});
    const double vol = std::pow(static_cast<double>(cell.side), sweep.dim);
    out.wegner_constant = std::max(out.wegner_constant, cell.mean / (cell.eps * vol));
  }
  if (!fit_ok(rows)) throw InsufficientData("fit_scaling: not enough valid cells in the linear window");

  const PlainFit base = least_squares(rows);
  out.slope_eps = base.slope_eps;
  out.slope_vol = base.slope_vol;
  out.r_squared = base.r_squared;
  out.cells_used = static_cast<int>(refs.size());

  // growth exponent of ||B_l||: transformed-coordinate (dependent coupling)
  // runs inherit the volume exponent d + q
  {
    Eigen::MatrixXd x(sweep.box_sizes.size(), 2);
    Eigen::VectorXd y(sweep.box_sizes.size());
    for (std::size_t i = 0; i < sweep.box_sizes.size(); ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = std::log(static_cast<double>(sweep.box_sizes[i]));
      y[i] = std::log(sweep.transform_row_norms[i]);
    }
    out.q_norm_growth = x.colPivHouseholderQr().solve(y)[1];
    out.bound_volume_exponent = sweep.dim + out.q_norm_growth;
  }

  // bootstrap over the sample axis, cell set held fixed
  std::vector<double> slopes_eps, slopes_vol;
  Rng rng(mix_seed(bootstrap_seed, 0xB0075EEDULL));
  for (int b = 0; b < bootstrap; ++b) {
    std::map<int, std::vector<int>> draw;
    for (int l : sweep.box_sizes) {
      auto& idx = draw[l];
      idx.resize(sweep.samples);
      for (int i = 0; i < sweep.samples; ++i)
        idx[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(sweep.samples)));
    }
    FitRows rrows;
    for (const auto& ref : refs) {
      const Eigen::MatrixXd& counts = sweep.counts.at(ref.side);
      double sum = 0.0;
      for (int i : draw[ref.side]) sum += counts(i, ref.eps_index);
      const double mean = sum / sweep.samples;
      if (mean <= 0.0) continue;
      rrows.log_eps.push_back(std::log(ref.eps));
      rrows.log_l.push_back(std::log(static_cast<double>(ref.side)));
      rrows.log_mean.push_back(std::log(mean));
    }
    if (!fit_ok(rrows)) continue;
    const PlainFit fit = least_squares(rrows);
    slopes_eps.push_back(fit.slope_eps);
    slopes_vol.push_back(fit.slope_vol);
  }
  if (static_cast<int>(slopes_eps.size()) < bootstrap / 2)
    throw InsufficientData("fit_scaling: bootstrap resamples mostly degenerate");
  out.bootstrap_resamples = static_cast<int>(slopes_eps.size());
  out.ci_eps_lo = percentile(slopes_eps, 2.5);
  out.ci_eps_hi = percentile(slopes_eps, 97.5);
  out.ci_vol_lo = percentile(slopes_vol, 2.5);
  out.ci_vol_hi = percentile(slopes_vol, 97.5);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// <phi, chi_j P(I) chi_j phi> for the operator with the given mesh potential.
double projection_overlap(const Eigen::VectorXd& potential, const GridSpec& grid,
                          const Eigen::VectorXd& phi_cell, double i_lo, double i_hi) {
  const auto h = assemble_hamiltonian(potential, grid);
  Eigen::MatrixXd dense(h.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("eigensolver failed");
  double s = 0.0;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    const double lambda = solver.eigenvalues()[i];
    if (lambda < i_lo || lambda > i_hi) continue;
    const double c = solver.eigenvectors().col(i).dot(phi_cell);
    s += c * c;
  }
  return s;
}

Eigen::VectorXd cell_indicator_times(const Eigen::VectorXd& phi, const GridSpec& grid,
                                     const LatticePoint& site) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i)
    if (grid.cell_of(i) == site) out[i] = phi[i];
  return out;
}

}  // namespace

SpavReport spectral_averaging_check(const SpavInstance& instance) {
  const ModelSpec& model = instance.model;
  if (model.dim != 1) throw ConfigError("spectral averaging check: 1-d models only");
  const GridSpec grid = model.grid(instance.side);
  const IndexBox box(model.dim, instance.side, model.u.alpha);
  if (box.plus_size() > 3) throw ConfigError("spectral averaging check: L <= 3 required");
  if (instance.phi.size() != grid.total_points())
    throw IndexMismatch("spectral averaging check: phi length");
  if (std::abs(instance.phi.norm() - 1.0) > 1e-8)
    throw ConfigError("spectral averaging check: phi must be normalized");
  if (box.lattice_index_of(instance.site) < 0)
    throw ConfigError("spectral averaging check: site outside Lambda~");

  const auto transform = build_transform(model.u.alpha, box);
  const CommonDensity cd(transform, model.density());
  const int jp = box.index_of(instance.site);
  const Eigen::VectorXd phi_cell = cell_indicator_times(instance.phi, grid, instance.site);

  SpavReport rep;
  rep.rhs = (instance.i_hi - instance.i_lo) * sup_over_coordinate(cd, jp, instance.eta);

  const auto panels = coordinate_panels(cd, jp, instance.eta);
  if (!panels.empty()) {
    Eigen::VectorXd eta = instance.eta;
    auto integrand = [&](double t) {
      eta[jp] = t;
      const double kv = cd.eval(eta);
      if (kv == 0.0) return 0.0;
      const Eigen::VectorXd pot =
          assemble_potential_from_eta(eta, box, model.u.w, model.v0, grid);
      return kv * projection_overlap(pot, grid, phi_cell, instance.i_lo, instance.i_hi);
    };
    const double tol = 1e-6 * std::max(rep.rhs, 1e-12) / static_cast<double>(panels.size() - 1);
    for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
      const QuadResult q = adaptive_simpson(integrand, panels[p], panels[p + 1], tol, 18);
      rep.lhs += q.value;
      rep.quadrature_error += q.error;
    }
  }
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-3) + 1e-12;
  return rep;
}

namespace {

Eigen::VectorXd random_unit_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Box-Muller from the portable uniform stream
    const double u1 = std::max(rng.uniform01(), 1e-16);
    const double u2 = rng.uniform01();
    v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  return v.normalized();
}

}  // namespace

SpavInstance make_random_spav_instance(const ModelSpec& model, int side, std::uint64_t seed) {
  Rng rng(seed);
  SpavInstance inst;
  inst.model = model;
  inst.side = side;
  const GridSpec grid = model.grid(side);
  const IndexBox box(model.dim, side, model.u.alpha);
  inst.phi = random_unit_vector(grid.total_points(), rng);
  inst.site = box.lattice()[rng.below(box.lattice().size())];

  const auto transform = build_transform(model.u.alpha, box);
  CouplingField field = sample_field(model.density(), box, rng.raw());
  inst.eta = transform.a * field.values;

  const auto h =
      assemble_hamiltonian(assemble_potential(field, model.u, model.v0, grid), grid);
  const SpectralSummary s = eigenvalues(h);
  // center the interval near a spectral value, otherwise nearly every
  // interval falls into a gap of these tiny boxes and the check is vacuous
  const double anchor = s.eigenvalues[rng.below(s.eigenvalues.size())];
  const double width = 0.05 + 0.45 * rng.uniform01();
  const double center = anchor + (rng.uniform01() - 0.5) * width;
  inst.i_lo = center - 0.5 * width;
  inst.i_hi = center + 0.5 * width;
  return inst;
}

MainEstimateReport main_estimate_check(const MainEstimateInstance& instance, int workers) {
  const ModelSpec& model = instance.model;
  if (model.dim != 1) throw ConfigError("main estimate check: 1-d models only");
  const GridSpec grid = model.grid(instance.side);
  const IndexBox box(model.dim, instance.side, model.u.alpha);
  if (box.plus_size() > 3) throw ConfigError("main estimate check: L <= 3 required");
  if (std::abs(instance.phi.norm() - 1.0) > 1e-8)
    throw ConfigError("main estimate check: phi must be normalized");

  const auto transform = build_transform(model.u.alpha, box);
  const DensityModel density = model.density();
  const double rhs =
      (instance.i_hi - instance.i_lo) * density.fprime_l1() * transform.row_sum_norm_b;
  const Eigen::VectorXd phi_cell = cell_indicator_times(instance.phi, grid, instance.site);

  std::vector<double> values(instance.samples);
  parallel_for(instance.samples, workers, [&](std::int64_t i) {
    const CouplingField field =
        sample_field(density, box, instance.seed + static_cast<std::uint64_t>(i));
    const Eigen::VectorXd pot = assemble_potential(field, model.u, model.v0, grid);
    values[i] = projection_overlap(pot, grid, phi_cell, instance.i_lo, instance.i_hi);
  });
  const MeanStd ms = mean_std(values);
  MainEstimateReport rep;
  rep.lhs_mean = ms.mean;
  rep.lhs_half_width = ms.half_width;
  rep.rhs = rhs;
  rep.holds = rep.lhs_mean <= rep.rhs + rep.lhs_half_width + 1e-12;
  return rep;
}

MainEstimateInstance make_random_main_estimate_instance(const ModelSpec& model, int side,
                                                        int samples, std::uint64_t seed) {
  Rng rng(seed);
  MainEstimateInstance inst;
  inst.model = model;
  inst.side = side;
  inst.samples = samples;
  inst.seed = rng.raw();
  const GridSpec grid = model.grid(side);
  const IndexBox box(model.dim, side, model.u.alpha);
  inst.phi = random_unit_vector(grid.total_points(), rng);
  inst.site = box.lattice()[rng.below(box.lattice().size())];

  const auto h = assemble_from_seed(model, side, rng.raw());
  const SpectralSummary s = eigenvalues(h);
  const double anchor = s.eigenvalues[rng.below(s.eigenvalues.size())];
  const double width = 0.05 + 0.45 * rng.uniform01();
  const double center = anchor + (rng.uniform01() - 0.5) * width;
  inst.i_lo = center - 0.5 * width;
  inst.i_hi = center + 0.5 * width;
  return inst;
}

}  // namespace alloylab
