#include "kinvlap/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "kinvlap/errors.hpp"
#include "kinvlap/parallel.hpp"
#include "kinvlap/rng.hpp"

namespace kinvlap {

namespace {

constexpr Real kDenominatorFloor = 1e-300;

Real median_of(std::vector<Real> v) {
  if (v.empty()) return std::numeric_limits<Real>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  Real m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                     v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

Real quantile_of(std::vector<Real> v, Real p) {
  if (v.empty()) return std::numeric_limits<Real>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const Real pos = p * static_cast<Real>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const Real frac = pos - static_cast<Real>(lo);
  return (1.0 - frac) * v[lo] + frac * v[hi];
}

std::uint64_t dataset_seed(std::uint64_t master, std::size_t n_index, int trial) {
  // One stream per (N, trial), shared across epsilons so that comparisons at
  // matched cells are paired.
  return master ^ (0x51ED2700A1B4E7D5ull * (n_index + 1)) ^
         (0xA24BAED4963EE407ull * (static_cast<std::uint64_t>(trial) + 1));
}

/// Torus/circle parameter-grid sample for the infinite-data surrogate.
Matrix manifold_grid(const std::string& name, const std::vector<Real>& params, int grid) {
  if (name == "torus_r4") {
    const Real r1 = params.at(0), r2 = params.at(1);
    Matrix pts(static_cast<Index>(grid) * grid, 4);
    Index row = 0;
    for (int a = 0; a < grid; ++a) {
      const Real alpha = kTwoPi * a / grid;
      for (int b = 0; b < grid; ++b) {
        const Real beta = kTwoPi * b / grid;
        pts.row(row++) << r1 * std::cos(alpha), r1 * std::sin(alpha),
            r2 * std::cos(beta), r2 * std::sin(beta);
      }
    }
    return pts;
  }
  if (name == "circle_r2") {
    const Real r = params.at(0);
    Matrix pts(grid, 2);
    for (int a = 0; a < grid; ++a)
      pts.row(a) << r * std::cos(kTwoPi * a / grid), r * std::sin(kTwoPi * a / grid);
    return pts;
  }
  throw ConfigError("no parameter grid available for manifold '" + name + "'");
}

GroupModel trivial_group(Index ambient_dim) {
  return make_cyclic_group(1, Matrix::Identity(ambient_dim, ambient_dim));
}

}  // namespace

Dataset sample_manifold(const std::string& name, const std::vector<Real>& params,
                        Index n_points, std::uint64_t seed, int quadrature_order) {
  if (name == "torus_r4") {
    if (params.size() != 2) throw ConfigError("manifold torus_r4 expects parameters [r1, r2]");
    return sample_torus_r4(n_points, params[0], params[1], seed, quadrature_order, 0);
  }
  if (name == "circle_r2") {
    if (params.size() != 1) throw ConfigError("manifold circle_r2 expects parameters [radius]");
    return sample_circle_r2(n_points, params[0], seed, quadrature_order, 0);
  }
  if (name == "so3_embedded_r9") {
    if (!params.empty()) throw ConfigError("manifold so3_embedded_r9 takes no parameters");
    return sample_so3_embedded(n_points, seed);
  }
  throw ConfigError("unknown manifold name '" + name + "'");
}

OrbitEvaluator::OrbitEvaluator(Dataset dataset, const TestFunction& fn)
    : dataset_(std::move(dataset)), fn_(fn), orbit_(orbit_points(dataset_)) {
  const Index q = dataset_.group.quadrature_size();
  const Index n = dataset_.size();
  ambient_values_.resize(q, n);
  for (Index u = 0; u < q; ++u)
    for (Index j = 0; j < n; ++j)
      ambient_values_(u, j) = fn_.value(orbit_[static_cast<std::size_t>(u)].row(j).transpose());
}

Real OrbitEvaluator::estimate(Index i, Real epsilon, bool exclude_diagonal) const {
  const GroupModel& g = dataset_.group;
  const Index q = g.quadrature_size();
  Real sf = 0.0, sg = 0.0, diag_f = 0.0, diag_g = 0.0;
  for (Index u = 0; u < q; ++u) {
    const Matrix& moved = orbit_[static_cast<std::size_t>(u)];
    const Vector kernel = (moved.rowwise() - dataset_.points.row(i))
                              .rowwise()
                              .squaredNorm()
                              .unaryExpr([&](Real v) { return std::exp(-v / epsilon); });
    const Real w = g.weight(u);
    sf += w * kernel.dot(ambient_values_.row(u).transpose());
    sg += w * kernel.sum();
    diag_f += w * kernel[i] * ambient_values_(u, i);
    diag_g += w * kernel[i];
  }
  if (exclude_diagonal) {
    sf -= diag_f;
    sg -= diag_g;
  }
  if (!(sg > kDenominatorFloor))
    throw NumericalRuntimeError(
        "orbit-integral denominator underflowed; increase epsilon");
  const Real f_anchor = fn_.value(dataset_.points.row(i).transpose());
  return (4.0 / epsilon) * (f_anchor - sf / sg);
}

Real OrbitEvaluator::estimate_at(const Eigen::Ref<const Vector>& anchor, Real f_at_anchor,
                                 Real epsilon) const {
  const GroupModel& g = dataset_.group;
  Real sf = 0.0, sg = 0.0;
  for (Index u = 0; u < g.quadrature_size(); ++u) {
    const Matrix& moved = orbit_[static_cast<std::size_t>(u)];
    const Vector kernel = (moved.rowwise() - anchor.transpose())
                              .rowwise()
                              .squaredNorm()
                              .unaryExpr([&](Real v) { return std::exp(-v / epsilon); });
    const Real w = g.weight(u);
    sf += w * kernel.dot(ambient_values_.row(u).transpose());
    sg += w * kernel.sum();
  }
  if (!(sg > kDenominatorFloor))
    throw NumericalRuntimeError(
        "orbit-integral denominator underflowed; increase epsilon");
  return (4.0 / epsilon) * (f_at_anchor - sf / sg);
}

Real OrbitEvaluator::reference(Index i) const {
  return fn_.laplace_beltrami(dataset_.points.row(i).transpose());
}

Real pointwise_estimate(const Dataset& dataset, const AffinityParams& params,
                        const TestFunction& fn, Index i, const GroupElement& kappa,
                        bool exclude_diagonal) {
  params.validate();
  const GroupModel& g = dataset.group;
  const Vector anchor = g.act(kappa, dataset.points.row(i).transpose());
  Real sf = 0.0, sg = 0.0;
  for (Index j = 0; j < dataset.size(); ++j) {
    if (exclude_diagonal && j == i) continue;
    for (Index u = 0; u < g.quadrature_size(); ++u) {
      const Vector moved = g.act(g.node(u), dataset.points.row(j).transpose());
      const Real k = g.weight(u) * std::exp(-(anchor - moved).squaredNorm() / params.epsilon);
      sf += k * fn.value(moved);
      sg += k;
    }
  }
  if (!(sg > kDenominatorFloor))
    throw NumericalRuntimeError(
        "orbit-integral denominator underflowed; increase epsilon");
  return (4.0 / params.epsilon) * (fn.value(anchor) - sf / sg);
}

Real baseline_vanilla_laplacian(const Dataset& dataset, const AffinityParams& params,
                                const TestFunction& fn, Index i) {
  const Dataset plain = with_group(dataset, trivial_group(dataset.ambient_dim()));
  return pointwise_estimate(plain, params, fn, i, plain.group.identity(), false);
}

void ConvergenceConfig::validate() const {
  if (n_values.empty() || epsilons.empty())
    throw ConfigError("convergence grid must contain at least one (N, epsilon) cell");
  if (trials < 1) throw ConfigError("trial count must be >= 1");
  if (eval_points < 1) throw ConfigError("evaluation subset must contain at least one point");
  for (Real e : epsilons)
    if (!(e > 0.0)) throw ConfigError("epsilon values must be positive");
  for (Index n : n_values)
    if (n < 1) throw ConfigError("N values must be positive");
  if (bias.enabled)
    for (Real e : bias.epsilons)
      if (!(e > 0.0)) throw ConfigError("bias surrogate epsilon values must be positive");
}

SlopeFit fit_loglog(const std::vector<Real>& x, const std::vector<Real>& y) {
  SlopeFit fit;
  std::vector<Real> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  fit.points_used = static_cast<int>(lx.size());
  if (lx.size() < 2) return fit;
  const Real n = static_cast<Real>(lx.size());
  const Real mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const Real my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  Real sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.valid = true;
  return fit;
}

namespace {

/// Bootstrap CI for a slope over cells: resample trials within each cell,
/// recompute pooled medians, refit.
void bootstrap_slope(SlopeFit& fit, const std::vector<Real>& xs,
                     const std::vector<const CellStats*>& cells, std::uint64_t seed) {
  if (!fit.valid || cells.empty()) return;
  constexpr int kReps = 200;
  Rng rng(seed);
  std::vector<Real> slopes;
  slopes.reserve(kReps);
  for (int rep = 0; rep < kReps; ++rep) {
    std::vector<Real> ys(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& tm = cells[c]->trial_medians;
      std::vector<Real> resampled(tm.size());
      for (std::size_t t = 0; t < tm.size(); ++t)
        resampled[t] = tm[static_cast<std::size_t>(rng.uniform() * tm.size())];
      ys[c] = median_of(resampled);
    }
    const SlopeFit s = fit_loglog(xs, ys);
    if (s.valid) slopes.push_back(s.slope);
  }
  if (slopes.size() >= 10) {
    fit.ci_lo = quantile_of(slopes, 0.025);
    fit.ci_hi = quantile_of(slopes, 0.975);
  }
}

}  // namespace

RateReport run_sweep(const ConvergenceConfig& config) {
  config.validate();
  RateReport report;

  Dataset probe = sample_manifold(config.manifold, config.manifold_params, 1, config.seed,
                                  config.quadrature_order);
  if (!probe.meta) throw ConfigError("sweep manifolds must carry metadata");
  const TestFunction fn = make_test_function(config.test_function, *probe.meta);

  const std::size_t n_count = config.n_values.size();
  const std::size_t e_count = config.epsilons.size();
  const std::size_t cell_count = n_count * e_count;

  // errors[(n_idx * e_count + e_idx) * trials + trial] = per-point abs errors
  std::vector<std::vector<Real>> errors(cell_count * config.trials);
  std::vector<std::vector<Real>> baseline_errors(cell_count * config.trials);

  const Index units = static_cast<Index>(n_count) * config.trials;
  parallel_for(units, [&](Index begin, Index end) {
    for (Index unit = begin; unit < end; ++unit) {
      const std::size_t n_idx = static_cast<std::size_t>(unit) / config.trials;
      const int trial = static_cast<int>(unit % config.trials);
      const Index n = config.n_values[n_idx];
      const Dataset ds =
          sample_manifold(config.manifold, config.manifold_params, n,
                          dataset_seed(config.seed, n_idx, trial), config.quadrature_order);
      const OrbitEvaluator aware(ds, fn);
      std::optional<OrbitEvaluator> plain;
      if (config.baseline)
        plain.emplace(with_group(ds, trivial_group(ds.ambient_dim())), fn);
      const Index n_eval = std::min(config.eval_points, n);
      for (std::size_t e_idx = 0; e_idx < e_count; ++e_idx) {
        const Real eps = config.epsilons[e_idx];
        const std::size_t slot = (n_idx * e_count + e_idx) * config.trials +
                                 static_cast<std::size_t>(trial);
        errors[slot].reserve(static_cast<std::size_t>(n_eval));
        for (Index i = 0; i < n_eval; ++i) {
          const Real ref = aware.reference(i);
          errors[slot].push_back(
              std::abs(aware.estimate(i, eps, config.exclude_diagonal) - ref));
          if (plain)
            baseline_errors[slot].push_back(
                std::abs(plain->estimate(i, eps, config.exclude_diagonal) - ref));
        }
      }
    }
  });

  // Bias surrogate: replace the sample mean with a dense parameter-grid
  // quadrature; the remaining error is the pure bandwidth bias.
  std::map<Real, Real> bias_at;
  const bool surrogate_ok =
      config.bias.enabled &&
      (config.manifold == "torus_r4" || config.manifold == "circle_r2");
  if (surrogate_ok) {
    const Matrix grid =
        manifold_grid(config.manifold, config.manifold_params, config.bias.grid);
    Dataset grid_ds{grid, probe.group, probe.meta};
    const OrbitEvaluator surrogate(std::move(grid_ds), fn);
    const Index n_eval = config.eval_points;
    const Dataset anchors =
        sample_manifold(config.manifold, config.manifold_params,
                        std::max<Index>(n_eval, 1), dataset_seed(config.seed, 0, 0),
                        config.quadrature_order);
    std::vector<Real> all_eps = config.bias.epsilons;
    for (Real e : config.epsilons)
      if (std::find(all_eps.begin(), all_eps.end(), e) == all_eps.end())
        all_eps.push_back(e);
    for (Real eps : all_eps) {
      std::vector<Real> errs;
      errs.reserve(static_cast<std::size_t>(n_eval));
      for (Index i = 0; i < n_eval; ++i) {
        const Vector a = anchors.points.row(i).transpose();
        errs.push_back(std::abs(surrogate.estimate_at(a, fn.value(a), eps) -
                                fn.laplace_beltrami(a)));
      }
      bias_at[eps] = median_of(errs);
    }
    for (Real eps : config.bias.epsilons)
      report.surrogate_errors.emplace_back(eps, bias_at.at(eps));
    std::vector<Real> bx, by;
    for (const auto& [eps, err] : report.surrogate_errors) {
      bx.push_back(eps);
      by.push_back(err);
    }
    report.bias_slope = fit_loglog(bx, by);
  }

  // Cell statistics and regime labels.
  report.cells.reserve(cell_count);
  int cells_won = 0, cells_compared = 0, trials_won = 0, trials_compared = 0;
  for (std::size_t n_idx = 0; n_idx < n_count; ++n_idx) {
    for (std::size_t e_idx = 0; e_idx < e_count; ++e_idx) {
      CellStats cell;
      cell.n_points = config.n_values[n_idx];
      cell.epsilon = config.epsilons[e_idx];
      cell.trials = config.trials;
      std::vector<Real> pooled, baseline_pooled;
      for (int t = 0; t < config.trials; ++t) {
        const std::size_t slot = (n_idx * e_count + e_idx) * config.trials +
                                 static_cast<std::size_t>(t);
        pooled.insert(pooled.end(), errors[slot].begin(), errors[slot].end());
        cell.trial_medians.push_back(median_of(errors[slot]));
        if (config.baseline) {
          baseline_pooled.insert(baseline_pooled.end(), baseline_errors[slot].begin(),
                                 baseline_errors[slot].end());
          cell.baseline_trial_medians.push_back(median_of(baseline_errors[slot]));
        }
      }
      cell.mean_abs_err =
          std::accumulate(pooled.begin(), pooled.end(), 0.0) / static_cast<Real>(pooled.size());
      cell.median_abs_err = median_of(pooled);
      cell.q25_abs_err = quantile_of(pooled, 0.25);
      cell.q75_abs_err = quantile_of(pooled, 0.75);
      if (config.baseline) {
        cell.baseline_median_abs_err = median_of(baseline_pooled);
        ++cells_compared;
        if (cell.median_abs_err <= cell.baseline_median_abs_err) ++cells_won;
        for (int t = 0; t < config.trials; ++t) {
          ++trials_compared;
          if (cell.trial_medians[static_cast<std::size_t>(t)] <=
              cell.baseline_trial_medians[static_cast<std::size_t>(t)])
            ++trials_won;
        }
      }
      if (surrogate_ok) {
        cell.bias_reference = bias_at.at(cell.epsilon);
        if (cell.median_abs_err >= 2.0 * cell.bias_reference)
          cell.regime = "variance";
        else if (cell.median_abs_err <= 1.25 * cell.bias_reference)
          cell.regime = "bias";
        else
          cell.regime = "mixed";
      }
      report.cells.push_back(std::move(cell));
    }
  }
  if (cells_compared > 0) {
    report.cell_win_fraction = static_cast<Real>(cells_won) / cells_compared;
    report.trial_win_fraction = static_cast<Real>(trials_won) / trials_compared;
  }

  // Slope of log error against log N at each epsilon.
  for (std::size_t e_idx = 0; e_idx < e_count; ++e_idx) {
    const Real eps = config.epsilons[e_idx];
    std::vector<Real> xs_all, ys_all, xs_var, ys_var;
    std::vector<const CellStats*> cells_all, cells_var;
    for (std::size_t n_idx = 0; n_idx < n_count; ++n_idx) {
      const CellStats& cell = report.cells[n_idx * e_count + e_idx];
      xs_all.push_back(static_cast<Real>(cell.n_points));
      ys_all.push_back(cell.median_abs_err);
      cells_all.push_back(&cell);
      if (cell.regime == "variance" || cell.regime == "unknown") {
        xs_var.push_back(static_cast<Real>(cell.n_points));
        ys_var.push_back(cell.median_abs_err);
        cells_var.push_back(&cell);
      }
    }
    SlopeFit all = fit_loglog(xs_all, ys_all);
    bootstrap_slope(all, xs_all, cells_all, config.seed ^ 0xB0075EED);
    report.slope_vs_n_allcells[eps] = all;
    SlopeFit var = fit_loglog(xs_var, ys_var);
    bootstrap_slope(var, xs_var, cells_var, config.seed ^ 0xB0075EED);
    report.slope_vs_n[eps] = var.valid ? var : all;
  }

  // Slope of log error against log epsilon at each N, variance regime only.
  for (std::size_t n_idx = 0; n_idx < n_count; ++n_idx) {
    std::vector<Real> xs, ys;
    std::vector<const CellStats*> cells;
    for (std::size_t e_idx = 0; e_idx < e_count; ++e_idx) {
      const CellStats& cell = report.cells[n_idx * e_count + e_idx];
      if (cell.regime == "variance" || cell.regime == "unknown") {
        xs.push_back(cell.epsilon);
        ys.push_back(cell.median_abs_err);
        cells.push_back(&cell);
      }
    }
    SlopeFit fit = fit_loglog(xs, ys);
    bootstrap_slope(fit, xs, cells, config.seed ^ 0x5EED5EED);
    report.slope_vs_eps[config.n_values[n_idx]] = fit;
  }

  return report;
}

}  // namespace kinvlap
