#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kinvlap/types.hpp"

namespace kinvlap {

enum class GroupKind { Cyclic, SO2, SO3 };

enum class So3Embedding { MatrixBlocks, VectorBlocks };

/// Element of one of the supported groups, stored as a small parameter
/// vector: a cyclic index in coords[0], a rotation angle in coords[0], or a
/// unit quaternion (w, x, y, z) in coords[0..3].
struct GroupElement {
  Eigen::Vector4d coords = Eigen::Vector4d::Zero();

  static GroupElement cyclic(int index);
  /// Wraps into [0, 2*pi).
  static GroupElement angle(Real theta);
  /// Normalizes; throws if the norm deviates from 1 by more than 1e-12.
  static GroupElement quaternion(const Eigen::Vector4d& q);

  int cyclic_index() const { return static_cast<int>(coords[0]); }
  Real so2_angle() const { return coords[0]; }
  const Eigen::Vector4d& quat() const { return coords; }
};

struct Irrep {
  int label = 0;  // cyclic: character index k; SO(2): frequency m; SO(3): degree l
  int dim = 1;
};

struct So3Quadrature {
  int n_alpha = 12;
  int n_beta = 6;
  int n_gamma = 12;
};

/// A compact group K: its elements, normalized Haar quadrature, irreducible
/// unitary representations, and isometric linear action on the ambient
/// space. Immutable after construction; all evaluation methods are pure and
/// safe to call concurrently.
class GroupModel {
 public:
  GroupKind kind() const { return kind_; }
  /// Dimension of the group manifold (0 for finite, 1 for planar rotations,
  /// 3 for spatial rotations).
  int dim_k() const { return dim_k_; }

  Index quadrature_size() const { return static_cast<Index>(nodes_.size()); }
  const GroupElement& node(Index t) const { return nodes_[static_cast<std::size_t>(t)]; }
  const std::vector<GroupElement>& nodes() const { return nodes_; }
  Real weight(Index t) const { return weights_[t]; }
  const Vector& weights() const { return weights_; }

  const std::vector<Irrep>& irreps() const { return irreps_; }
  Index irrep_count() const { return static_cast<Index>(irreps_.size()); }
  /// Position of a label in the irrep list; throws ConfigError if absent.
  Index irrep_index(int label) const;
  /// Position of the trivial (constant) character.
  Index trivial_irrep_index() const { return irrep_index(0); }

  /// U_l evaluated at one element; dim x dim unitary.
  ComplexMatrix irrep_matrix(Index irrep_idx, const GroupElement& k) const;
  /// All irrep matrices at one element, cheapest when several degrees are
  /// needed at once.
  std::vector<ComplexMatrix> irrep_matrices_all(const GroupElement& k) const;
  /// Node stack for one irrep: a Q x dim^2 matrix whose row t holds the
  /// row-major entries of U_l(node t).
  ComplexMatrix irrep_node_stack(Index irrep_idx) const;
  /// Node stacks for every irrep, sharing one evaluation sweep per node.
  std::vector<ComplexMatrix> irrep_node_stacks() const;

  GroupElement identity() const;
  GroupElement compose(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  /// Distance of a from the identity in a kind-specific metric (index
  /// distance, |angle| folded to [0, pi], or rotation angle).
  Real distance_from_identity(const GroupElement& a) const;

  /// Applies the linear isometric action to one ambient vector.
  Vector act(const GroupElement& k, const Eigen::Ref<const Vector>& x) const;
  /// Applies the action to every row of an N x D matrix.
  Matrix act_points(const GroupElement& k, const Eigen::Ref<const Matrix>& points) const;
  /// Throws ConfigError when the ambient dimension does not fit the action.
  void validate_ambient_dim(Index ambient_dim) const;

  /// Copy with the irrep list truncated (or extended) to a new band limit:
  /// ignored for cyclic groups, |m| <= limit for planar rotations, l <= limit
  /// for spatial rotations (enlarging the quadrature if needed for exactness).
  GroupModel with_band_limit(int limit) const;

  // Construction parameters, kept for serialization.
  int cyclic_order() const { return cyclic_n_; }
  const Matrix& cyclic_generator() const { return generator_; }
  int so2_quadrature_order() const { return so2_q_; }
  int so2_m_max() const { return so2_m_max_; }
  const std::vector<std::pair<int, int>>& so2_pairs() const { return pairs_; }
  const So3Quadrature& so3_quadrature() const { return so3_quad_; }
  int so3_l_max() const { return so3_l_max_; }
  So3Embedding so3_embedding() const { return so3_embedding_; }

 private:
  friend GroupModel make_cyclic_group(int, const Matrix&);
  friend GroupModel make_so2_group(int, int, const std::vector<std::pair<int, int>>&);
  friend GroupModel make_so3_group(const So3Quadrature&, int, So3Embedding);
  GroupModel() = default;

  Eigen::Matrix3d rotation_of(const GroupElement& k) const;

  GroupKind kind_ = GroupKind::Cyclic;
  int dim_k_ = 0;
  std::vector<GroupElement> nodes_;
  Vector weights_;
  std::vector<Irrep> irreps_;

  // cyclic
  int cyclic_n_ = 1;
  Matrix generator_;
  std::vector<Matrix> powers_;
  // planar rotations
  int so2_q_ = 1;
  int so2_m_max_ = 0;
  std::vector<std::pair<int, int>> pairs_;
  // spatial rotations
  So3Quadrature so3_quad_;
  int so3_l_max_ = 0;
  So3Embedding so3_embedding_ = So3Embedding::MatrixBlocks;
};

/// Finite cyclic group of order n acting through powers of an orthogonal
/// generator with generator^n = Id. Quadrature: all n elements with weight
/// 1/n. Irreps: the n characters exp(2*pi*i*k*j/n).
GroupModel make_cyclic_group(int n, const Matrix& generator);

/// Planar rotation group sampled at q uniform angles (weights 1/q, exact for
/// trigonometric polynomials up to degree q-1), acting on disjoint coordinate
/// pairs. Irreps: characters exp(i*m*theta) for |m| <= m_max; requires
/// 2*m_max < q so that sampled characters stay distinct.
GroupModel make_so2_group(int quadrature_order, int m_max,
                          const std::vector<std::pair<int, int>>& pairs);

/// Spatial rotation group with an Euler-angle product quadrature (uniform in
/// the two axial angles, Gauss-Legendre in the cosine of the middle angle;
/// weights sum to 1) and representation matrices of degrees 0..l_max.
/// Requires n_alpha, n_gamma even and >= 2*l_max+1, n_beta >= l_max+1, which
/// makes the quadrature exact on products of two included matrix entries.
GroupModel make_so3_group(const So3Quadrature& quadrature, int l_max,
                          So3Embedding embedding = So3Embedding::MatrixBlocks);

/// Default spatial quadrature for a given band limit; oversampled for kernel
/// coefficient accuracy, not just exactness on the band.
So3Quadrature so3_default_quadrature(int l_max);

/// Quadrature evaluation of the normalized Haar integral of f. Exact for
/// finite groups.
Complex haar_integrate(const GroupModel& g,
                       const std::function<Complex(const GroupElement&)>& f);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Vector& nodes, Vector& weights);

const char* group_kind_name(GroupKind kind);

}  // namespace kinvlap
