#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kinvlap/group.hpp"
#include "kinvlap/types.hpp"

namespace kinvlap {

/// Description of the synthetic manifold a dataset was drawn from, carrying
/// the information needed by embedding-constraint checks and closed-form
/// Laplace-Beltrami oracles.
struct ManifoldMeta {
  std::string name;  // torus_r4, circle_r2, so3_embedded_r9, custom
  int intrinsic_dim = 0;
  std::vector<Real> parameters;  // radii etc.
  std::uint64_t seed = 0;
};

/// N points in R^D together with the group acting on them. Immutable after
/// construction.
struct Dataset {
  Matrix points;  // rows are sample points
  GroupModel group;
  std::optional<ManifoldMeta> meta;

  Index size() const { return points.rows(); }
  Index ambient_dim() const { return points.cols(); }
};

/// Uniform sample of the flat product of two circles embedded in R^4:
/// (r1 cos a, r1 sin a, r2 cos b, r2 sin b). The attached group rotates the
/// first coordinate pair. Same seed, same bytes.
Dataset sample_torus_r4(Index n_points, Real r1, Real r2, std::uint64_t seed,
                        int quadrature_order = 64, int m_max = 8);

/// Uniform sample of the circle of the given radius in R^2, with the planar
/// rotation group acting on both coordinates; the minimal case where the
/// orbit space is a single point.
Dataset sample_circle_r2(Index n_points, Real radius, std::uint64_t seed,
                         int quadrature_order = 64, int m_max = 8);

/// Haar-uniform rotation matrices flattened row-major into R^9, acted on by
/// left multiplication (an isometry of the Frobenius norm); the action is
/// free everywhere.
Dataset sample_so3_embedded(Index n_points, std::uint64_t seed,
                            const So3Quadrature& quadrature = so3_default_quadrature(2),
                            int l_max = 2);

/// Copy of a dataset with a different group attached (for example a finite
/// subgroup of the generator's symmetry group). Validates ambient
/// compatibility.
Dataset with_group(const Dataset& dataset, GroupModel group);

/// Deviation of a point from the manifold's embedding constraints; zero on
/// the manifold. Used by invariance checks.
Real embedding_residual(const ManifoldMeta& meta, const Eigen::Ref<const Vector>& x);

/// Closed-form Laplace-Beltrami test functions, ambient evaluation plus the
/// image under the (positive semidefinite sign convention) operator.
struct TestFunction {
  std::string name;
  std::function<Real(const Eigen::Ref<const Vector>&)> value;
  std::function<Real(const Eigen::Ref<const Vector>&)> laplace_beltrami;
};

/// Known test functions per manifold: "x1"/"x3" coordinate functions on
/// torus_r4, "x1" on circle_r2, "entry00" on so3_embedded_r9. Throws
/// ConfigError for unknown names.
TestFunction make_test_function(const std::string& name, const ManifoldMeta& meta);

}  // namespace kinvlap
