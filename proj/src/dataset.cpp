#include "kinvlap/dataset.hpp"

#include <cmath>

#include "kinvlap/errors.hpp"
#include "kinvlap/rng.hpp"

namespace kinvlap {

Dataset sample_torus_r4(Index n_points, Real r1, Real r2, std::uint64_t seed,
                        int quadrature_order, int m_max) {
  if (n_points < 1) throw ConfigError("need at least one sample point");
  if (r1 <= 0 || r2 <= 0) throw ConfigError("torus radii must be positive");
  Rng rng(seed);
  Matrix pts(n_points, 4);
  for (Index i = 0; i < n_points; ++i) {
    const Real a = rng.angle();
    const Real b = rng.angle();
    pts.row(i) << r1 * std::cos(a), r1 * std::sin(a), r2 * std::cos(b), r2 * std::sin(b);
  }
  Dataset ds{std::move(pts), make_so2_group(quadrature_order, m_max, {{0, 1}}),
             ManifoldMeta{"torus_r4", 2, {r1, r2}, seed}};
  return ds;
}

Dataset sample_circle_r2(Index n_points, Real radius, std::uint64_t seed,
                         int quadrature_order, int m_max) {
  if (n_points < 1) throw ConfigError("need at least one sample point");
  if (radius <= 0) throw ConfigError("circle radius must be positive");
  Rng rng(seed);
  Matrix pts(n_points, 2);
  for (Index i = 0; i < n_points; ++i) {
    const Real t = rng.angle();
    pts.row(i) << radius * std::cos(t), radius * std::sin(t);
  }
  Dataset ds{std::move(pts), make_so2_group(quadrature_order, m_max, {{0, 1}}),
             ManifoldMeta{"circle_r2", 1, {radius}, seed}};
  return ds;
}

Dataset sample_so3_embedded(Index n_points, std::uint64_t seed,
                            const So3Quadrature& quadrature, int l_max) {
  if (n_points < 1) throw ConfigError("need at least one sample point");
  Rng rng(seed);
  Matrix pts(n_points, 9);
  for (Index i = 0; i < n_points; ++i) {
    const Eigen::Vector4d q = rng.unit_quaternion();
    const Real w = q[0], x = q[1], y = q[2], z = q[3];
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    for (Index a = 0; a < 3; ++a)
      for (Index b = 0; b < 3; ++b) pts(i, 3 * a + b) = r(a, b);
  }
  Dataset ds{std::move(pts), make_so3_group(quadrature, l_max, So3Embedding::MatrixBlocks),
             ManifoldMeta{"so3_embedded_r9", 3, {}, seed}};
  return ds;
}

Dataset with_group(const Dataset& dataset, GroupModel group) {
  group.validate_ambient_dim(dataset.ambient_dim());
  return Dataset{dataset.points, std::move(group), dataset.meta};
}

Real embedding_residual(const ManifoldMeta& meta, const Eigen::Ref<const Vector>& x) {
  if (meta.name == "torus_r4") {
    const Real r1 = meta.parameters.at(0), r2 = meta.parameters.at(1);
    return std::max(std::abs(x.segment<2>(0).norm() - r1),
                    std::abs(x.segment<2>(2).norm() - r2));
  }
  if (meta.name == "circle_r2") {
    return std::abs(x.norm() - meta.parameters.at(0));
  }
  if (meta.name == "so3_embedded_r9") {
    Eigen::Matrix3d r;
    for (Index a = 0; a < 3; ++a)
      for (Index b = 0; b < 3; ++b) r(a, b) = x[3 * a + b];
    const Real ortho = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return std::max(ortho, std::abs(r.determinant() - 1.0));
  }
  throw ConfigError("no embedding constraint known for manifold '" + meta.name + "'");
}

TestFunction make_test_function(const std::string& name, const ManifoldMeta& meta) {
  if (meta.name == "torus_r4" || meta.name == "circle_r2") {
    const Real r1 = meta.parameters.at(0);
    const Real r2 = meta.name == "torus_r4" ? meta.parameters.at(1) : r1;
    if (name == "x1") {
      return {name, [](const Eigen::Ref<const Vector>& x) { return x[0]; },
              [r1](const Eigen::Ref<const Vector>& x) { return x[0] / (r1 * r1); }};
    }
    if (name == "x3" && meta.name == "torus_r4") {
      return {name, [](const Eigen::Ref<const Vector>& x) { return x[2]; },
              [r2](const Eigen::Ref<const Vector>& x) { return x[2] / (r2 * r2); }};
    }
  }
  if (meta.name == "so3_embedded_r9" && name == "entry00") {
    // Matrix entries are degree-1 representation coefficients; under the
    // Frobenius-induced metric their Laplace-Beltrami eigenvalue is
    // l(l+1)/2 = 1.
    return {name, [](const Eigen::Ref<const Vector>& x) { return x[0]; },
            [](const Eigen::Ref<const Vector>& x) { return x[0]; }};
  }
  throw ConfigError("unknown test function '" + name + "' for manifold '" + meta.name + "'");
}

}  // namespace kinvlap
