#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "kinvlap/convergence.hpp"
#include "kinvlap/errors.hpp"

using namespace kinvlap;

TEST_CASE("constant functions are estimated exactly") {
  const Dataset ds = sample_torus_r4(32, 1.0, 1.0, 1, 32, 0);
  TestFunction constant{"const", [](const Eigen::Ref<const Vector>&) { return 2.0; },
                        [](const Eigen::Ref<const Vector>&) { return 0.0; }};
  const Real est =
      pointwise_estimate(ds, {0.3}, constant, 0, ds.group.identity(), false);
  CHECK(std::abs(est) < 1e-12);
  CHECK(std::abs(baseline_vanilla_laplacian(ds, {0.3}, constant, 0)) < 1e-12);
}

TEST_CASE("baseline coincides with the estimator under the trivial group") {
  const Dataset base = sample_torus_r4(24, 1.0, 1.0, 2, 16, 0);
  const Dataset trivial =
      with_group(base, make_cyclic_group(1, Matrix::Identity(4, 4)));
  const TestFunction fn = make_test_function("x3", *base.meta);
  for (Index i : {Index{0}, Index{5}, Index{17}}) {
    const Real a = pointwise_estimate(trivial, {0.4}, fn, i, trivial.group.identity(), false);
    const Real b = baseline_vanilla_laplacian(base, {0.4}, fn, i);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("evaluator agrees with the direct estimator and excludes the diagonal") {
  const Dataset ds = sample_torus_r4(48, 1.0, 1.0, 3, 32, 0);
  const TestFunction fn = make_test_function("x3", *ds.meta);
  const OrbitEvaluator eval(ds, fn);
  for (Index i : {Index{0}, Index{7}}) {
    for (bool excl : {false, true}) {
      const Real direct = pointwise_estimate(ds, {0.35}, fn, i, ds.group.identity(), excl);
      CHECK(eval.estimate(i, 0.35, excl) == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("estimates approach the closed-form operator value") {
  // moderately large sample: the estimate should land within a reasonable
  // band of the true value, far closer than the function scale
  const Dataset ds = sample_torus_r4(1024, 1.0, 1.0, 4, 48, 0);
  const TestFunction fn = make_test_function("x3", *ds.meta);
  const OrbitEvaluator eval(ds, fn);
  Real err = 0.0;
  const Index n_eval = 16;
  for (Index i = 0; i < n_eval; ++i)
    err += std::abs(eval.estimate(i, 0.25, false) - eval.reference(i));
  err /= static_cast<Real>(n_eval);
  CHECK(err < 0.5);
}

TEST_CASE("diagonal terms change the estimate by a vanishing amount") {
  const TestFunction fn =
      make_test_function("x3", ManifoldMeta{"torus_r4", 2, {1.0, 1.0}, 0});
  const Real eps = 0.3;
  Real prev_gap = 0.0;
  int step = 0;
  for (Index n : {Index{128}, Index{1024}}) {
    const Dataset ds = sample_torus_r4(n, 1.0, 1.0, 5, 32, 0);
    const OrbitEvaluator eval(ds, fn);
    Real gap = 0.0;
    for (Index i = 0; i < 8; ++i)
      gap += std::abs(eval.estimate(i, eps, true) - eval.estimate(i, eps, false));
    gap /= 8.0;
    if (step == 1) {
      // an eightfold larger sample should shrink the gap roughly eightfold;
      // allow wide slack for randomness
      CHECK(gap < 0.5 * prev_gap);
    }
    prev_gap = gap;
    ++step;
  }
}

TEST_CASE("single-cell sweep reports one cell and no fits") {
  ConvergenceConfig config;
  config.manifold = "torus_r4";
  config.manifold_params = {1.0, 1.0};
  config.quadrature_order = 16;
  config.n_values = {64};
  config.epsilons = {0.4};
  config.trials = 2;
  config.seed = 7;
  config.eval_points = 8;
  config.baseline = true;
  config.test_function = "x3";
  config.bias.enabled = false;
  const RateReport report = run_sweep(config);
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].trials == 2);
  CHECK(report.cells[0].median_abs_err >= 0.0);
  CHECK_FALSE(report.slope_vs_n.at(0.4).valid);
  CHECK(report.cell_win_fraction >= 0.0);
}

TEST_CASE("sweep cells are reproducible for a fixed seed") {
  ConvergenceConfig config;
  config.manifold = "circle_r2";
  config.manifold_params = {1.0};
  config.quadrature_order = 16;
  config.n_values = {32, 64};
  config.epsilons = {0.3};
  config.trials = 3;
  config.seed = 11;
  config.eval_points = 8;
  config.baseline = false;
  config.test_function = "x1";
  config.bias.enabled = false;
  const RateReport a = run_sweep(config);
  const RateReport b = run_sweep(config);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t c = 0; c < a.cells.size(); ++c)
    CHECK(a.cells[c].median_abs_err == b.cells[c].median_abs_err);
}

TEST_CASE("sweep results do not depend on the thread cap") {
  ConvergenceConfig config;
  config.manifold = "torus_r4";
  config.manifold_params = {1.0, 1.0};
  config.quadrature_order = 16;
  config.n_values = {32, 64};
  config.epsilons = {0.3};
  config.trials = 3;
  config.seed = 77;
  config.eval_points = 6;
  config.baseline = true;
  config.test_function = "x3";
  config.bias.enabled = false;
  setenv("KINVLAP_THREADS", "1", 1);
  const RateReport serial = run_sweep(config);
  unsetenv("KINVLAP_THREADS");
  const RateReport parallel = run_sweep(config);
  REQUIRE(serial.cells.size() == parallel.cells.size());
  for (std::size_t c = 0; c < serial.cells.size(); ++c) {
    CHECK(serial.cells[c].median_abs_err == parallel.cells[c].median_abs_err);
    CHECK(serial.cells[c].baseline_median_abs_err ==
          parallel.cells[c].baseline_median_abs_err);
  }
}

TEST_CASE("underflowing bandwidth raises the runtime error") {
  const Dataset ds = sample_torus_r4(8, 1.0, 1.0, 9, 8, 0);
  const TestFunction fn = make_test_function("x3", *ds.meta);
  const OrbitEvaluator eval(ds, fn);
  CHECK_THROWS_AS(eval.estimate(0, 1e-8, true), NumericalRuntimeError);
}

TEST_CASE("loglog fit recovers exact power laws") {
  std::vector<Real> x{1.0, 2.0, 4.0, 8.0};
  std::vector<Real> y;
  for (Real v : x) y.push_back(3.0 * std::pow(v, -0.5));
  const SlopeFit fit = fit_loglog(x, y);
  REQUIRE(fit.valid);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK_FALSE(fit_loglog({1.0}, {2.0}).valid);
}

TEST_CASE("config validation rejects empty grids and bad parameters") {
  ConvergenceConfig config;
  config.n_values = {};
  config.epsilons = {0.1};
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.n_values = {16};
  config.trials = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.trials = 1;
  config.epsilons = {-0.1};
  CHECK_THROWS_AS(config.validate(), ConfigError);
}
