#include <doctest.h>

#include <cmath>
#include <complex>

#include "kinvlap/errors.hpp"
#include "kinvlap/group.hpp"
#include "kinvlap/rng.hpp"
#include "kinvlap/wigner.hpp"

using namespace kinvlap;

namespace {

Matrix planar_rotation(Real theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

GroupElement random_element(const GroupModel& g, Rng& rng) {
  switch (g.kind()) {
    case GroupKind::Cyclic:
      return GroupElement::cyclic(static_cast<int>(rng.uniform() * g.cyclic_order()));
    case GroupKind::SO2:
      return GroupElement::angle(rng.angle());
    case GroupKind::SO3:
      return GroupElement::quaternion(rng.unit_quaternion());
  }
  return g.identity();
}

void check_irrep_axioms(const GroupModel& g, Real tol) {
  Rng rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const GroupElement a = random_element(g, rng);
    const GroupElement b = random_element(g, rng);
    for (Index li = 0; li < g.irrep_count(); ++li) {
      const ComplexMatrix ua = g.irrep_matrix(li, a);
      const int d = g.irreps()[static_cast<std::size_t>(li)].dim;
      // unitary
      CHECK((ua.adjoint() * ua - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <
            tol);
      // homomorphism
      const ComplexMatrix uab = g.irrep_matrix(li, g.compose(a, b));
      CHECK((uab - ua * g.irrep_matrix(li, b)).cwiseAbs().maxCoeff() < tol);
    }
  }
}

// Schur orthogonality through the quadrature:
// int U_l(k)_{mn}^* U_l'(k)_{m'n'} dk = delta / dim.
void check_schur(const GroupModel& g, Real tol) {
  const auto stacks = g.irrep_node_stacks();
  for (Index a = 0; a < g.irrep_count(); ++a) {
    for (Index b = a; b < g.irrep_count(); ++b) {
      const ComplexMatrix gram = stacks[static_cast<std::size_t>(a)].adjoint() *
                                 g.weights().asDiagonal() *
                                 stacks[static_cast<std::size_t>(b)];
      if (a == b) {
        const int d = g.irreps()[static_cast<std::size_t>(a)].dim;
        const ComplexMatrix expected =
            ComplexMatrix::Identity(gram.rows(), gram.cols()) / static_cast<Real>(d);
        CHECK((gram - expected).cwiseAbs().maxCoeff() < tol);
      } else {
        CHECK(gram.cwiseAbs().maxCoeff() < tol);
      }
    }
  }
}

}  // namespace

TEST_CASE("trivial cyclic group has the constant character") {
  const GroupModel g = make_cyclic_group(1, Matrix::Identity(2, 2));
  CHECK(g.quadrature_size() == 1);
  CHECK(g.irrep_count() == 1);
  CHECK(g.dim_k() == 0);
  CHECK(g.irrep_matrix(0, g.node(0))(0, 0) == Complex(1.0, 0.0));
  CHECK(g.weight(0) == doctest::Approx(1.0));
}

TEST_CASE("cyclic order 4 characters are powers of i") {
  const GroupModel g = make_cyclic_group(4, planar_rotation(kPi / 2));
  const Index k1 = g.irrep_index(1);
  for (int j = 0; j < 4; ++j) {
    const Complex chi = g.irrep_matrix(k1, GroupElement::cyclic(j))(0, 0);
    const Complex expected = std::pow(Complex(0.0, 1.0), j);
    CHECK(std::abs(chi - expected) < 1e-14);
  }
}

TEST_CASE("cyclic order 8 Schur sums are exact") {
  const GroupModel g = make_cyclic_group(8, planar_rotation(kPi / 4));
  // direct summation over all 8 elements
  for (int k = 0; k < 8; ++k)
    for (int kp = 0; kp < 8; ++kp) {
      Complex acc(0.0, 0.0);
      for (int j = 0; j < 8; ++j) {
        const Complex a = g.irrep_matrix(g.irrep_index(k), GroupElement::cyclic(j))(0, 0);
        const Complex b = g.irrep_matrix(g.irrep_index(kp), GroupElement::cyclic(j))(0, 0);
        acc += std::conj(a) * b / 8.0;
      }
      CHECK(std::abs(acc - (k == kp ? 1.0 : 0.0)) < 1e-14);
    }
  check_schur(g, 1e-13);
  check_irrep_axioms(g, 1e-12);
}

TEST_CASE("cyclic group construction rejects bad generators") {
  Matrix not_orthogonal(2, 2);
  not_orthogonal << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(make_cyclic_group(2, not_orthogonal), ConfigError);
  // 90-degree rotation has order 4, not 3
  CHECK_THROWS_AS(make_cyclic_group(3, planar_rotation(kPi / 2)), ConfigError);
}

TEST_CASE("planar rotation group: minimal quadrature") {
  const GroupModel g = make_so2_group(1, 0, {{0, 1}});
  CHECK(g.quadrature_size() == 1);
  CHECK(g.node(0).so2_angle() == doctest::Approx(0.0));
  CHECK(g.weight(0) == doctest::Approx(1.0));
  CHECK(g.dim_k() == 1);
}

TEST_CASE("planar rotation characters are orthonormal on the grid") {
  const GroupModel g = make_so2_group(16, 5, {{0, 1}});
  const Complex self = haar_integrate(g, [](const GroupElement& k) {
    return std::polar(1.0, 3.0 * k.so2_angle()) * std::polar(1.0, -3.0 * k.so2_angle());
  });
  CHECK(std::abs(self - 1.0) < 1e-15);
  const Complex cross = haar_integrate(g, [](const GroupElement& k) {
    return std::polar(1.0, 3.0 * k.so2_angle()) * std::polar(1.0, -5.0 * k.so2_angle());
  });
  CHECK(std::abs(cross) < 1e-14);
  check_schur(g, 1e-13);
  check_irrep_axioms(g, 1e-12);
}

TEST_CASE("planar rotation group rejects overlapping pairs and aliased bands") {
  CHECK_THROWS_AS(make_so2_group(16, 3, {{0, 1}, {1, 2}}), ConfigError);
  CHECK_THROWS_AS(make_so2_group(8, 4, {{0, 1}}), ConfigError);
}

TEST_CASE("spatial rotation irreps: identity and degree zero") {
  const GroupModel g = make_so3_group(so3_default_quadrature(2), 2);
  Rng rng(3);
  const GroupElement any = random_element(g, rng);
  CHECK(std::abs(g.irrep_matrix(0, any)(0, 0) - Complex(1.0, 0.0)) < 1e-14);
  for (Index li = 0; li < g.irrep_count(); ++li) {
    const int d = g.irreps()[static_cast<std::size_t>(li)].dim;
    const ComplexMatrix u = g.irrep_matrix(li, g.identity());
    CHECK((u - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-14);
  }
  check_irrep_axioms(g, 1e-12);
  check_schur(g, 1e-12);
}

TEST_CASE("spatial rotation Schur normalization of the middle entry") {
  // int |D^1_{00}|^2 over the group is 1/(2*1+1); refine the quadrature and
  // require agreement within 1e-8.
  Real prev = 0.0;
  for (int scale : {1, 2}) {
    const So3Quadrature q{8 * scale, 4 * scale, 8 * scale};
    const GroupModel g = make_so3_group(q, 1);
    const Complex val = haar_integrate(g, [&](const GroupElement& k) {
      const Complex d00 = g.irrep_matrix(g.irrep_index(1), k)(1, 1);
      return std::conj(d00) * d00;
    });
    CHECK(std::abs(val - 1.0 / 3.0) < 1e-8);
    if (scale == 2) CHECK(std::abs(val.real() - prev) < 1e-8);
    prev = val.real();
  }
}

TEST_CASE("haar quadrature integrates simple functions") {
  const GroupModel z4 = make_cyclic_group(4, planar_rotation(kPi / 2));
  CHECK(std::abs(haar_integrate(z4, [](const GroupElement&) { return Complex(1.0, 0.0); }) -
                 1.0) < 1e-15);
  CHECK(std::abs(haar_integrate(z4, [](const GroupElement& k) {
          return std::pow(Complex(0.0, 1.0), k.cyclic_index());
        })) < 1e-15);

  const GroupModel so2 = make_so2_group(32, 4, {{0, 1}});
  const Complex cos2 = haar_integrate(so2, [](const GroupElement& k) {
    const Real c = std::cos(k.so2_angle());
    return Complex(c * c, 0.0);
  });
  CHECK(std::abs(cos2 - 0.5) < 1e-14);
}

TEST_CASE("quadrature weights are a probability measure") {
  for (const GroupModel& g :
       {make_cyclic_group(6, planar_rotation(kPi / 3)), make_so2_group(24, 5, {{0, 1}}),
        make_so3_group(so3_default_quadrature(1), 1)}) {
    CHECK((g.weights().array() > 0.0).all());
    CHECK(g.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("quadrature is invariant under left shifts by nodes") {
  auto probe = [](const GroupModel& g, const GroupElement& k) {
    // fixed smooth probe evaluated through the action on a fixed vector
    Vector x = Vector::Zero(g.kind() == GroupKind::SO3 ? 9 : 2);
    if (g.kind() == GroupKind::SO3) {
      x << 1, 0, 0, 0, 1, 0, 0, 0, 1;
    } else {
      x << 0.8, -0.3;
    }
    const Vector y = g.act(k, x);
    return Complex(std::exp(-(y[0] - 0.1) * (y[0] - 0.1)) + 0.25 * y[1], 0.0);
  };
  for (const GroupModel& g :
       {make_cyclic_group(8, planar_rotation(kPi / 4)), make_so2_group(16, 3, {{0, 1}})}) {
    const Complex base = haar_integrate(g, [&](const GroupElement& k) { return probe(g, k); });
    for (Index s = 0; s < g.quadrature_size(); ++s) {
      const GroupElement shift = g.node(s);
      const Complex moved = haar_integrate(
          g, [&](const GroupElement& k) { return probe(g, g.compose(shift, k)); });
      CHECK(std::abs(moved - base) < 1e-12);
    }
  }
}

TEST_CASE("doubling the quadrature changes smooth integrals below tolerance") {
  auto f = [](const GroupElement& k) {
    return Complex(std::exp(std::cos(k.so2_angle())), 0.0);
  };
  const Complex coarse = haar_integrate(make_so2_group(32, 3, {{0, 1}}), f);
  const Complex fine = haar_integrate(make_so2_group(64, 3, {{0, 1}}), f);
  CHECK(std::abs(coarse - fine) < 1e-12);

  auto fr = [](const GroupModel& g, const GroupElement& k) {
    Vector x(9);
    x << 1, 0, 0, 0, 1, 0, 0, 0, 1;
    const Vector y = g.act(k, x);
    return Complex(std::exp(0.5 * y[0]), 0.0);
  };
  const GroupModel g1 = make_so3_group({12, 8, 12}, 1);
  const GroupModel g2 = make_so3_group({24, 16, 24}, 1);
  const Complex c1 = haar_integrate(g1, [&](const GroupElement& k) { return fr(g1, k); });
  const Complex c2 = haar_integrate(g2, [&](const GroupElement& k) { return fr(g2, k); });
  CHECK(std::abs(c1 - c2) < 1e-8);
}

TEST_CASE("group actions are isometries and respect composition") {
  Rng rng(11);
  for (const GroupModel& g :
       {make_cyclic_group(5, planar_rotation(kTwoPi / 5)), make_so2_group(16, 3, {{0, 1}}),
        make_so3_group(so3_default_quadrature(1), 1)}) {
    const Index d = g.kind() == GroupKind::SO3 ? 9 : 2;
    for (int rep = 0; rep < 10; ++rep) {
      Vector x(d), y(d);
      for (Index c = 0; c < d; ++c) {
        x[c] = rng.uniform(-1, 1);
        y[c] = rng.uniform(-1, 1);
      }
      const GroupElement a = random_element(g, rng);
      const GroupElement b = random_element(g, rng);
      CHECK(std::abs((g.act(a, x) - g.act(a, y)).norm() - (x - y).norm()) < 1e-10);
      CHECK((g.act(g.identity(), x) - x).norm() < 1e-12);
      CHECK((g.act(a, g.act(b, x)) - g.act(g.compose(a, b), x)).norm() < 1e-10);
      CHECK((g.act(g.inverse(a), g.act(a, x)) - x).norm() < 1e-10);
    }
  }
}

TEST_CASE("wigner stack builds unitary homomorphisms beyond the tested band") {
  Rng rng(23);
  for (int rep = 0; rep < 4; ++rep) {
    const Eigen::Vector4d qa = rng.unit_quaternion();
    const Eigen::Vector4d qb = rng.unit_quaternion();
    const GroupModel g = make_so3_group(so3_default_quadrature(4), 4);
    const GroupElement a = GroupElement::quaternion(qa);
    const GroupElement b = GroupElement::quaternion(qb);
    const auto sa = g.irrep_matrices_all(a);
    const auto sb = g.irrep_matrices_all(b);
    const auto sab = g.irrep_matrices_all(g.compose(a, b));
    for (int l = 0; l <= 4; ++l) {
      const Index d = 2 * l + 1;
      CHECK((sa[static_cast<std::size_t>(l)].adjoint() * sa[static_cast<std::size_t>(l)] -
             ComplexMatrix::Identity(d, d))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK((sab[static_cast<std::size_t>(l)] -
             sa[static_cast<std::size_t>(l)] * sb[static_cast<std::size_t>(l)])
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("band limit adjustment preserves the group kind") {
  const GroupModel so2 = make_so2_group(16, 3, {{0, 1}});
  const GroupModel wider = so2.with_band_limit(10);
  CHECK(wider.so2_m_max() == 10);
  CHECK(wider.irrep_count() == 21);
  CHECK(wider.so2_quadrature_order() >= 22);

  const GroupModel so3 = make_so3_group(so3_default_quadrature(2), 2);
  const GroupModel so3w = so3.with_band_limit(3);
  CHECK(so3w.so3_l_max() == 3);
  CHECK(so3w.irrep_count() == 4);

  const GroupModel zn = make_cyclic_group(4, planar_rotation(kPi / 2));
  CHECK(zn.with_band_limit(1).irrep_count() == 4);
}

TEST_CASE("unknown irrep labels are rejected") {
  const GroupModel g = make_so2_group(16, 3, {{0, 1}});
  CHECK_THROWS_AS(g.irrep_index(7), ConfigError);
}

TEST_CASE("diagonal planar action rotates every listed pair") {
  const GroupModel g = make_so2_group(16, 3, {{0, 1}, {2, 3}});
  Rng rng(31);
  Vector x(5);
  for (Index c = 0; c < 5; ++c) x[c] = rng.uniform(-1, 1);
  const Real theta = 0.9;
  const Vector y = g.act(GroupElement::angle(theta), x);
  const Real c = std::cos(theta), s = std::sin(theta);
  CHECK(y[0] == doctest::Approx(c * x[0] - s * x[1]));
  CHECK(y[1] == doctest::Approx(s * x[0] + c * x[1]));
  CHECK(y[2] == doctest::Approx(c * x[2] - s * x[3]));
  CHECK(y[3] == doctest::Approx(s * x[2] + c * x[3]));
  CHECK(y[4] == doctest::Approx(x[4]));
  for (int rep = 0; rep < 5; ++rep) {
    const GroupElement a = random_element(g, rng);
    const GroupElement b = random_element(g, rng);
    Vector u(5), v(5);
    for (Index cc = 0; cc < 5; ++cc) {
      u[cc] = rng.uniform(-1, 1);
      v[cc] = rng.uniform(-1, 1);
    }
    CHECK(std::abs((g.act(a, u) - g.act(a, v)).norm() - (u - v).norm()) < 1e-12);
    CHECK((g.act(a, g.act(b, u)) - g.act(g.compose(a, b), u)).norm() < 1e-12);
  }
}

TEST_CASE("vector-block spatial action rotates each three-vector") {
  const GroupModel g =
      make_so3_group(so3_default_quadrature(1), 1, So3Embedding::VectorBlocks);
  Rng rng(37);
  Vector x(6);
  for (Index c = 0; c < 6; ++c) x[c] = rng.uniform(-1, 1);
  const GroupElement k = GroupElement::quaternion(rng.unit_quaternion());
  const Vector y = g.act(k, x);
  CHECK(y.segment<3>(0).norm() == doctest::Approx(x.segment<3>(0).norm()));
  CHECK(y.segment<3>(3).norm() == doctest::Approx(x.segment<3>(3).norm()));
  // inner products between blocks are preserved by a common rotation
  CHECK(y.segment<3>(0).dot(y.segment<3>(3)) ==
        doctest::Approx(x.segment<3>(0).dot(x.segment<3>(3))));
  CHECK_THROWS_AS(g.validate_ambient_dim(7), ConfigError);
}
