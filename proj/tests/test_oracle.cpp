#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "kinvlap/apply.hpp"
#include "kinvlap/errors.hpp"
#include "kinvlap/oracle.hpp"
#include "kinvlap/rng.hpp"

using namespace kinvlap;

namespace {

Matrix quarter_turn_r4() {
  Matrix gen = Matrix::Identity(4, 4);
  gen(0, 0) = 0;
  gen(0, 1) = -1;
  gen(1, 0) = 1;
  gen(1, 1) = 0;
  return gen;
}

Matrix eighth_turn_r4() {
  Matrix gen = Matrix::Identity(4, 4);
  const Real c = std::cos(kPi / 4), s = std::sin(kPi / 4);
  gen(0, 0) = c;
  gen(0, 1) = -s;
  gen(1, 0) = s;
  gen(1, 1) = c;
  return gen;
}

}  // namespace

TEST_CASE("trivial group reduces the reference to the classical Laplacian") {
  Matrix pts(3, 2);
  pts << 0.0, 0.0, 1.0, 0.0, 0.5, 0.5;
  const Dataset ds{pts, make_cyclic_group(1, Matrix::Identity(2, 2)), std::nullopt};
  const AffinityParams params{1.0};
  const Matrix lap = dense_laplacian(ds, params);
  Matrix w(3, 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      w(i, j) = std::exp(-(pts.row(i) - pts.row(j)).squaredNorm() / params.epsilon);
  Matrix expected = -w;
  expected.diagonal() += w.rowwise().sum();
  CHECK((lap - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("two-element sign group on one point has a hand-computable reference") {
  Matrix pts(1, 2);
  pts << 0.6, 0.0;
  const Dataset ds{pts, make_cyclic_group(2, -Matrix::Identity(2, 2)), std::nullopt};
  const AffinityParams params{1.0};
  // vertices x and -x; cross affinity exp(-|2x|^2) with weight 1/2
  const Real cross = std::exp(-(2 * pts.row(0)).squaredNorm() / params.epsilon);
  const Matrix lap = dense_laplacian(ds, params);
  REQUIRE(lap.rows() == 2);
  const Real diag = 0.5 * (1.0 + cross);
  CHECK(lap(0, 0) == doctest::Approx(diag - 0.5).epsilon(1e-14));
  CHECK(lap(0, 1) == doctest::Approx(-0.5 * cross).epsilon(1e-14));
  Eigen::SelfAdjointEigenSolver<Matrix> es(lap);
  CHECK(std::abs(es.eigenvalues()[0]) < 1e-14);
  CHECK(es.eigenvalues()[1] == doctest::Approx(cross).epsilon(1e-12));
}

TEST_CASE("block spectrum equals the dense reference for a finite group") {
  const Dataset base = sample_torus_r4(4, 1.0, 0.8, 21, 8, 3);
  const Dataset ds = with_group(base, make_cyclic_group(8, eighth_turn_r4()));
  const AffinityParams params{median_squared_distance(ds)};
  const SpectralBundle bundle = full_spectrum(ds, params, false);
  const std::vector<Real> dense = dense_spectrum(ds, params);
  CHECK(dense.size() == bundle.expanded_eigenvalues().size());
  const SpectraReport report = compare_spectra(dense, bundle);
  CHECK(report.unmatched == 0);
  CHECK(report.max_abs_dev < 1e-8);
  for (const auto& [label, dev] : report.per_irrep_dev) CHECK(dev < 1e-8);
  CHECK(dense.front() > -1e-10);
}

TEST_CASE("three points under a cyclic group match the reference") {
  const Dataset base = sample_torus_r4(3, 1.0, 0.5, 22, 8, 3);
  const Dataset ds = with_group(base, make_cyclic_group(8, eighth_turn_r4()));
  const AffinityParams params{0.9};
  const SpectraReport report =
      compare_spectra(dense_spectrum(ds, params), full_spectrum(ds, params, false));
  CHECK(report.unmatched == 0);
  CHECK(report.max_abs_dev < 1e-8);
}

TEST_CASE("quarter-turn group on four points matches the reference") {
  const Dataset base = sample_torus_r4(4, 1.0, 0.5, 23, 8, 3);
  const Dataset ds = with_group(base, make_cyclic_group(4, quarter_turn_r4()));
  const AffinityParams params{1.2};
  const SpectraReport report =
      compare_spectra(dense_spectrum(ds, params), full_spectrum(ds, params, false));
  CHECK(report.unmatched == 0);
  CHECK(report.max_abs_dev < 1e-8);
}

TEST_CASE("planar group truncated band stays within the documented tail bound") {
  const Dataset ds = sample_torus_r4(4, 1.0, 0.5, 24, 64, 16);
  const AffinityParams params{0.8};
  const auto blocks = assemble_blocks(ds, params);
  const SpectralBundle bundle = full_spectrum(blocks, false);
  const std::vector<Real> dense = dense_spectrum(ds, params);
  // dense carries all grid frequencies; the banded method only |m| <= 16
  CHECK(dense.size() > bundle.expanded_eigenvalues().size());
  const SpectraReport report = compare_spectra(dense, bundle);
  const TailReport tail = reconstruction_report(blocks, ds, params);
  CHECK(report.unmatched == 0);
  CHECK(report.max_abs_dev <= std::max(tail.declared_bound * ds.size(), 1e-10));
}

TEST_CASE("trivial-group comparison has essentially zero deviation") {
  Matrix pts(5, 2);
  pts << 0, 0, 1, 0, 0, 1, 1, 1, 0.5, 0.5;
  const Dataset ds{pts, make_cyclic_group(1, Matrix::Identity(2, 2)), std::nullopt};
  const AffinityParams params{1.0};
  const SpectraReport report =
      compare_spectra(dense_spectrum(ds, params), full_spectrum(ds, params, false));
  CHECK(report.unmatched == 0);
  CHECK(report.max_abs_dev < 1e-12);
}

TEST_CASE("dense reference eigenvalues are nonnegative") {
  const Dataset ds = sample_torus_r4(3, 1.0, 0.5, 25, 16, 3);
  const std::vector<Real> dense = dense_spectrum(ds, {0.7});
  CHECK(dense.front() > -1e-10);
}

TEST_CASE("diagonal two-pair planar action matches the reference within its tail") {
  // rotate both circles of the torus simultaneously
  const Dataset base = sample_torus_r4(3, 1.0, 0.6, 27, 8, 0);
  const Dataset ds = with_group(base, make_so2_group(64, 12, {{0, 1}, {2, 3}}));
  const AffinityParams params{0.8};
  const auto blocks = assemble_blocks(ds, params);
  const SpectraReport report =
      compare_spectra(dense_spectrum(ds, params), full_spectrum(blocks, false));
  const TailReport tail = reconstruction_report(blocks, ds, params);
  CHECK(report.unmatched == 0);
  CHECK(report.max_abs_dev <= std::max(tail.declared_bound * ds.size(), 1e-10));
}

TEST_CASE("weighted dense reference matches the collocation operator") {
  // The dense matrix and apply_laplacian discretize the same operator; with
  // the Gauss-Legendre product rule at the default order they agree far
  // below the eigenvalue tolerances.
  const Dataset ds = sample_so3_embedded(2, 55, {12, 6, 12}, 1);
  const AffinityParams params{2.5};
  const GroupModel& g = ds.group;
  const Index n = ds.size(), q = g.quadrature_size();
  const Matrix lsym = dense_laplacian(ds, params);
  Rng rng(3);
  GammaFunction f;
  f.values.resize(n, q);
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < q; ++t) f.values(i, t) = Complex(rng.uniform(-1, 1), 0.0);
  const GammaFunction lf = apply_laplacian(f, ds, params);
  Vector fv(n * q), sw(n * q);
  for (Index j = 0; j < n; ++j)
    for (Index u = 0; u < q; ++u) {
      fv[j * q + u] = f.values(j, u).real();
      sw[j * q + u] = std::sqrt(g.weight(u));
    }
  const Vector out =
      sw.cwiseInverse().asDiagonal() * (lsym * sw.cwiseProduct(fv).eval());
  Real worst = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < q; ++t)
      worst = std::max(worst, std::abs(out[i * q + t] - lf.values(i, t).real()));
  CHECK(worst < 1e-10);
}

TEST_CASE("oversized augmented sets are rejected") {
  const Dataset ds = sample_torus_r4(400, 1.0, 0.5, 26, 64, 3);
  CHECK_THROWS_AS(dense_laplacian(ds, {0.5}), ConfigError);
}
