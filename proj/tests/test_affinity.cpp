#include <doctest.h>

#include <cmath>

#include "kinvlap/affinity.hpp"
#include "kinvlap/errors.hpp"
#include "kinvlap/rng.hpp"

using namespace kinvlap;

namespace {

Dataset small_torus(Index n, std::uint64_t seed, int q = 16, int m_max = 3) {
  return sample_torus_r4(n, 1.0, 0.5, seed, q, m_max);
}

}  // namespace

TEST_CASE("affinity of coincident augmented points is one") {
  const Dataset ds = small_torus(2, 1);
  const GroupElement k = GroupElement::angle(1.1);
  const Vector x = ds.points.row(0).transpose();
  CHECK(affinity(x, x, k, k, ds.group, {0.5}) == doctest::Approx(1.0));
}

TEST_CASE("affinity hits 1/e at squared distance epsilon") {
  const GroupModel g = make_cyclic_group(1, Matrix::Identity(2, 2));
  Vector a(2), b(2);
  a << 0.0, 0.0;
  b << 1.0, 0.0;
  CHECK(affinity(a, b, g.identity(), g.identity(), g, {1.0}) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("affinity reduces to a single group argument") {
  const Dataset ds = small_torus(3, 2);
  Rng rng(5);
  const AffinityParams params{0.7};
  for (int rep = 0; rep < 20; ++rep) {
    const GroupElement k = GroupElement::angle(rng.angle());
    const GroupElement l = GroupElement::angle(rng.angle());
    const Vector xi = ds.points.row(0).transpose();
    const Vector xj = ds.points.row(1).transpose();
    const Real two_arg = affinity(xi, xj, k, l, ds.group, params);
    const Real one_arg = affinity(xi, xj, ds.group.identity(),
                                  ds.group.compose(ds.group.inverse(k), l), ds.group, params);
    CHECK(std::abs(two_arg - one_arg) < 1e-12);
    // bi-invariance under a common left shift
    const GroupElement eta = GroupElement::angle(rng.angle());
    const Real shifted = affinity(xi, xj, ds.group.compose(eta, k),
                                  ds.group.compose(eta, l), ds.group, params);
    CHECK(std::abs(two_arg - shifted) < 1e-12);
  }
}

TEST_CASE("profile of the trivial group is the plain kernel value") {
  const GroupModel g = make_cyclic_group(1, Matrix::Identity(4, 4));
  const Dataset base = small_torus(2, 3);
  const Vector xi = base.points.row(0).transpose();
  const Vector xj = base.points.row(1).transpose();
  const Vector profile = affinity_profile(xi, xj, g, {0.9});
  CHECK(profile.size() == 1);
  CHECK(profile[0] ==
        doctest::Approx(std::exp(-(xi - xj).squaredNorm() / 0.9)).epsilon(1e-14));
}

TEST_CASE("profile peaks at the node moving one point onto the other") {
  const Dataset ds = small_torus(1, 4);
  const GroupElement eta = ds.group.node(5);
  const Vector xi = ds.group.act(eta, ds.points.row(0).transpose());
  const Vector profile =
      affinity_profile(xi, ds.points.row(0).transpose(), ds.group, {0.3});
  Index argmax = 0;
  profile.maxCoeff(&argmax);
  CHECK(argmax == 5);
  CHECK(profile[5] == doctest::Approx(1.0));
}

TEST_CASE("swapping the pair conjugates the profile argument") {
  const Dataset ds = small_torus(2, 6);
  const AffinityParams params{0.4};
  const Vector xi = ds.points.row(0).transpose();
  const Vector xj = ds.points.row(1).transpose();
  const Vector pij = affinity_profile(xi, xj, ds.group, params);
  const Vector pji = affinity_profile(xj, xi, ds.group, params);
  for (Index t = 0; t < ds.group.quadrature_size(); ++t) {
    // node t has inverse at position (q - t) mod q on the uniform grid
    const Index tinv = (ds.group.quadrature_size() - t) % ds.group.quadrature_size();
    CHECK(std::abs(pij[t] - pji[tinv]) < 1e-12);
  }
}

TEST_CASE("profiles stay in (0, 1]") {
  const Dataset ds = small_torus(4, 7);
  for (Index i = 0; i < ds.size(); ++i)
    for (Index j = 0; j < ds.size(); ++j) {
      const Vector p = affinity_profile(ds.points.row(i).transpose(),
                                        ds.points.row(j).transpose(), ds.group, {0.6});
      CHECK((p.array() > 0.0).all());
      CHECK((p.array() <= 1.0 + 1e-15).all());
    }
}

TEST_CASE("single-point degree under the trivial group is the self affinity") {
  Matrix pts(1, 2);
  pts << 0.3, -0.2;
  const Dataset ds{pts, make_cyclic_group(1, Matrix::Identity(2, 2)), std::nullopt};
  const Vector deg = degree(ds, {1.0});
  CHECK(deg.size() == 1);
  CHECK(deg[0] == doctest::Approx(1.0));
}

TEST_CASE("single-point degree matches the quadrature of its own profile") {
  const Dataset circle = sample_circle_r2(1, 1.0, 8, 16, 3);
  const AffinityParams params{0.5};
  const Vector profile = affinity_profile(circle.points.row(0).transpose(),
                                          circle.points.row(0).transpose(),
                                          circle.group, params);
  const Real expected = profile.dot(circle.group.weights());
  CHECK(degree(circle, params)[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("degree is independent of the anchoring group element") {
  const Dataset ds = small_torus(5, 9);
  const AffinityParams params{0.8};
  const Vector deg = degree(ds, params);
  CHECK((deg.array() > 0.0).all());
  for (Index t = 0; t < ds.group.quadrature_size(); t += 5)
    for (Index i = 0; i < ds.size(); ++i)
      CHECK(std::abs(degree_at(ds, params, i, ds.group.node(t)) - deg[i]) < 1e-12);
}

TEST_CASE("bandwidth heuristic and validation") {
  const Dataset ds = small_torus(16, 10);
  const Real med = median_squared_distance(ds);
  CHECK(med > 0.0);
  Index above = 0;
  Index total = 0;
  for (Index i = 0; i < ds.size(); ++i)
    for (Index j = i + 1; j < ds.size(); ++j) {
      above += (ds.points.row(i) - ds.points.row(j)).squaredNorm() >= med ? 1 : 0;
      ++total;
    }
  CHECK(std::abs(2.0 * above - total) <= 2.0);
  CHECK_THROWS_AS(median_squared_distance(small_torus(1, 1)), ConfigError);
  CHECK_THROWS_AS(AffinityParams{-1.0}.validate(), ConfigError);
  CHECK_THROWS_AS(AffinityParams{0.0}.validate(), ConfigError);
}
