#include "kinvlap/group.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kinvlap/errors.hpp"
#include "kinvlap/wigner.hpp"

namespace kinvlap {

namespace {

Eigen::Vector4d quat_multiply(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

Eigen::Matrix3d quat_to_rotation(const Eigen::Vector4d& q) {
  const Real w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Eigen::Vector4d quat_rz(Real t) { return {std::cos(t / 2), 0.0, 0.0, std::sin(t / 2)}; }
Eigen::Vector4d quat_ry(Real t) { return {std::cos(t / 2), 0.0, std::sin(t / 2), 0.0}; }

Real wrap_angle(Real theta) {
  Real a = std::fmod(theta, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;  // fmod can round up to 2*pi
  return a;
}

}  // namespace

GroupElement GroupElement::cyclic(int index) {
  GroupElement e;
  e.coords[0] = static_cast<Real>(index);
  return e;
}

GroupElement GroupElement::angle(Real theta) {
  GroupElement e;
  e.coords[0] = wrap_angle(theta);
  return e;
}

GroupElement GroupElement::quaternion(const Eigen::Vector4d& q) {
  const Real n = q.norm();
  if (std::abs(n - 1.0) > 1e-12) {
    if (std::abs(n - 1.0) > 1e-6 || n == 0.0)
      throw ConfigError("group element quaternion is not unit norm");
  }
  GroupElement e;
  e.coords = q / n;
  return e;
}

Index GroupModel::irrep_index(int label) const {
  for (std::size_t i = 0; i < irreps_.size(); ++i)
    if (irreps_[i].label == label) return static_cast<Index>(i);
  throw ConfigError("unknown irrep label " + std::to_string(label));
}

Eigen::Matrix3d GroupModel::rotation_of(const GroupElement& k) const {
  return quat_to_rotation(k.quat());
}

ComplexMatrix GroupModel::irrep_matrix(Index irrep_idx, const GroupElement& k) const {
  const Irrep& ir = irreps_.at(static_cast<std::size_t>(irrep_idx));
  switch (kind_) {
    case GroupKind::Cyclic: {
      long kj = static_cast<long>(ir.label) * k.cyclic_index() % cyclic_n_;
      if (kj < 0) kj += cyclic_n_;
      return ComplexMatrix::Constant(
          1, 1, std::polar(1.0, kTwoPi * static_cast<Real>(kj) / cyclic_n_));
    }
    case GroupKind::SO2:
      return ComplexMatrix::Constant(1, 1, std::polar(1.0, ir.label * k.so2_angle()));
    case GroupKind::SO3:
      return wigner_stack(rotation_of(k), ir.label).back();
  }
  throw Error("unreachable group kind");
}

std::vector<ComplexMatrix> GroupModel::irrep_matrices_all(const GroupElement& k) const {
  if (kind_ == GroupKind::SO3) return wigner_stack(rotation_of(k), so3_l_max_);
  std::vector<ComplexMatrix> out;
  out.reserve(irreps_.size());
  for (Index i = 0; i < irrep_count(); ++i) out.push_back(irrep_matrix(i, k));
  return out;
}

ComplexMatrix GroupModel::irrep_node_stack(Index irrep_idx) const {
  const Irrep& ir = irreps_.at(static_cast<std::size_t>(irrep_idx));
  const Index q = quadrature_size();
  ComplexMatrix stack(q, static_cast<Index>(ir.dim) * ir.dim);
  for (Index t = 0; t < q; ++t) {
    const ComplexMatrix u = irrep_matrix(irrep_idx, nodes_[static_cast<std::size_t>(t)]);
    for (int m = 0; m < ir.dim; ++m)
      for (int n = 0; n < ir.dim; ++n) stack(t, m * ir.dim + n) = u(m, n);
  }
  return stack;
}

std::vector<ComplexMatrix> GroupModel::irrep_node_stacks() const {
  const Index q = quadrature_size();
  std::vector<ComplexMatrix> stacks;
  stacks.reserve(irreps_.size());
  for (const Irrep& ir : irreps_)
    stacks.emplace_back(q, static_cast<Index>(ir.dim) * ir.dim);
  for (Index t = 0; t < q; ++t) {
    const auto mats = irrep_matrices_all(nodes_[static_cast<std::size_t>(t)]);
    for (std::size_t li = 0; li < irreps_.size(); ++li) {
      const int d = irreps_[li].dim;
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) stacks[li](t, m * d + n) = mats[li](m, n);
    }
  }
  return stacks;
}

GroupElement GroupModel::identity() const {
  switch (kind_) {
    case GroupKind::Cyclic:
      return GroupElement::cyclic(0);
    case GroupKind::SO2:
      return GroupElement::angle(0.0);
    case GroupKind::SO3:
      return GroupElement::quaternion({1.0, 0.0, 0.0, 0.0});
  }
  throw Error("unreachable group kind");
}

GroupElement GroupModel::compose(const GroupElement& a, const GroupElement& b) const {
  switch (kind_) {
    case GroupKind::Cyclic:
      return GroupElement::cyclic((a.cyclic_index() + b.cyclic_index()) % cyclic_n_);
    case GroupKind::SO2:
      return GroupElement::angle(a.so2_angle() + b.so2_angle());
    case GroupKind::SO3: {
      Eigen::Vector4d q = quat_multiply(a.quat(), b.quat());
      return GroupElement::quaternion(q / q.norm());
    }
  }
  throw Error("unreachable group kind");
}

GroupElement GroupModel::inverse(const GroupElement& a) const {
  switch (kind_) {
    case GroupKind::Cyclic:
      return GroupElement::cyclic((cyclic_n_ - a.cyclic_index()) % cyclic_n_);
    case GroupKind::SO2:
      return GroupElement::angle(-a.so2_angle());
    case GroupKind::SO3: {
      const Eigen::Vector4d& q = a.quat();
      return GroupElement::quaternion({q[0], -q[1], -q[2], -q[3]});
    }
  }
  throw Error("unreachable group kind");
}

Real GroupModel::distance_from_identity(const GroupElement& a) const {
  switch (kind_) {
    case GroupKind::Cyclic:
      return a.cyclic_index() == 0 ? 0.0 : 1.0;
    case GroupKind::SO2: {
      const Real t = a.so2_angle();
      return std::min(t, kTwoPi - t);
    }
    case GroupKind::SO3:
      return 2.0 * std::acos(std::min(1.0, std::abs(a.quat()[0])));
  }
  throw Error("unreachable group kind");
}

Vector GroupModel::act(const GroupElement& k, const Eigen::Ref<const Vector>& x) const {
  Matrix row = x.transpose();
  return act_points(k, row).row(0).transpose();
}

Matrix GroupModel::act_points(const GroupElement& k,
                              const Eigen::Ref<const Matrix>& points) const {
  validate_ambient_dim(points.cols());
  switch (kind_) {
    case GroupKind::Cyclic: {
      const Matrix& a = powers_.at(static_cast<std::size_t>(k.cyclic_index()));
      return points * a.transpose();
    }
    case GroupKind::SO2: {
      Matrix out = points;
      const Real c = std::cos(k.so2_angle());
      const Real s = std::sin(k.so2_angle());
      for (const auto& [p, q] : pairs_) {
        out.col(p) = c * points.col(p) - s * points.col(q);
        out.col(q) = s * points.col(p) + c * points.col(q);
      }
      return out;
    }
    case GroupKind::SO3: {
      const Eigen::Matrix3d r = rotation_of(k);
      Matrix out(points.rows(), points.cols());
      if (so3_embedding_ == So3Embedding::MatrixBlocks) {
        // Rows hold row-major 3x3 blocks X; the action maps X to R*X.
        for (Index blk = 0; blk + 9 <= points.cols(); blk += 9)
          for (Index a = 0; a < 3; ++a)
            for (Index b = 0; b < 3; ++b)
              out.col(blk + 3 * a + b) = r(a, 0) * points.col(blk + b) +
                                         r(a, 1) * points.col(blk + 3 + b) +
                                         r(a, 2) * points.col(blk + 6 + b);
      } else {
        for (Index blk = 0; blk + 3 <= points.cols(); blk += 3)
          for (Index a = 0; a < 3; ++a)
            out.col(blk + a) = r(a, 0) * points.col(blk) +
                               r(a, 1) * points.col(blk + 1) +
                               r(a, 2) * points.col(blk + 2);
      }
      return out;
    }
  }
  throw Error("unreachable group kind");
}

void GroupModel::validate_ambient_dim(Index ambient_dim) const {
  switch (kind_) {
    case GroupKind::Cyclic:
      if (ambient_dim != generator_.rows())
        throw ConfigError("ambient dimension " + std::to_string(ambient_dim) +
                          " does not match the cyclic generator size " +
                          std::to_string(generator_.rows()));
      return;
    case GroupKind::SO2:
      for (const auto& [p, q] : pairs_)
        if (p >= ambient_dim || q >= ambient_dim)
          throw ConfigError("rotation pair (" + std::to_string(p) + ", " +
                            std::to_string(q) + ") is out of range for ambient dimension " +
                            std::to_string(ambient_dim));
      return;
    case GroupKind::SO3: {
      const Index blk = so3_embedding_ == So3Embedding::MatrixBlocks ? 9 : 3;
      if (ambient_dim <= 0 || ambient_dim % blk != 0)
        throw ConfigError("ambient dimension " + std::to_string(ambient_dim) +
                          " is not a multiple of the rotation block size " +
                          std::to_string(blk));
      return;
    }
  }
}

GroupModel GroupModel::with_band_limit(int limit) const {
  switch (kind_) {
    case GroupKind::Cyclic:
      return *this;  // finite index set, always complete
    case GroupKind::SO2: {
      int q = so2_q_;
      if (2 * limit >= q) q = 2 * limit + 2;
      return make_so2_group(q, limit, pairs_);
    }
    case GroupKind::SO3: {
      So3Quadrature quad = so3_quad_;
      const So3Quadrature min_quad = so3_default_quadrature(limit);
      quad.n_alpha = std::max(quad.n_alpha, min_quad.n_alpha);
      quad.n_beta = std::max(quad.n_beta, min_quad.n_beta);
      quad.n_gamma = std::max(quad.n_gamma, min_quad.n_gamma);
      return make_so3_group(quad, limit, so3_embedding_);
    }
  }
  throw Error("unreachable group kind");
}

GroupModel make_cyclic_group(int n, const Matrix& generator) {
  if (n < 1) throw ConfigError("cyclic group order must be positive");
  if (generator.rows() != generator.cols() || generator.rows() < 1)
    throw ConfigError("cyclic generator must be a square matrix");
  const Index d = generator.rows();
  if ((generator.transpose() * generator - Matrix::Identity(d, d))
          .cwiseAbs()
          .maxCoeff() > 1e-10)
    throw ConfigError("cyclic generator is not orthogonal");

  GroupModel g;
  g.kind_ = GroupKind::Cyclic;
  g.dim_k_ = 0;
  g.cyclic_n_ = n;
  g.generator_ = generator;
  g.powers_.reserve(static_cast<std::size_t>(n));
  g.powers_.push_back(Matrix::Identity(d, d));
  for (int j = 1; j < n; ++j) g.powers_.push_back(generator * g.powers_.back());
  if ((generator * g.powers_.back() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() >
      1e-10)
    throw ConfigError("cyclic generator does not have order " + std::to_string(n));

  g.nodes_.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) g.nodes_.push_back(GroupElement::cyclic(j));
  g.weights_ = Vector::Constant(n, 1.0 / n);
  for (int k = 0; k < n; ++k) g.irreps_.push_back({k, 1});
  return g;
}

GroupModel make_so2_group(int quadrature_order, int m_max,
                          const std::vector<std::pair<int, int>>& pairs) {
  if (quadrature_order < 1) throw ConfigError("quadrature order must be >= 1");
  if (m_max < 0) throw ConfigError("m_max must be nonnegative");
  if (2 * m_max >= quadrature_order && !(m_max == 0 && quadrature_order == 1))
    throw ConfigError("need quadrature order > 2*m_max to keep sampled characters distinct");
  if (pairs.empty()) throw ConfigError("at least one rotation coordinate pair is required");
  std::set<int> seen;
  for (const auto& [p, q] : pairs) {
    if (p < 0 || q < 0 || p == q)
      throw ConfigError("invalid rotation coordinate pair");
    if (!seen.insert(p).second || !seen.insert(q).second)
      throw ConfigError("rotation coordinate pairs overlap");
  }

  GroupModel g;
  g.kind_ = GroupKind::SO2;
  g.dim_k_ = 1;
  g.so2_q_ = quadrature_order;
  g.so2_m_max_ = m_max;
  g.pairs_ = pairs;
  g.nodes_.reserve(static_cast<std::size_t>(quadrature_order));
  for (int t = 0; t < quadrature_order; ++t)
    g.nodes_.push_back(GroupElement::angle(kTwoPi * t / quadrature_order));
  g.weights_ = Vector::Constant(quadrature_order, 1.0 / quadrature_order);
  for (int m = -m_max; m <= m_max; ++m) g.irreps_.push_back({m, 1});
  return g;
}

So3Quadrature so3_default_quadrature(int l_max) {
  So3Quadrature q;
  q.n_alpha = std::max(4, 4 * (l_max + 1));
  q.n_beta = std::max(2, 2 * (l_max + 1));
  q.n_gamma = q.n_alpha;
  return q;
}

GroupModel make_so3_group(const So3Quadrature& quadrature, int l_max,
                          So3Embedding embedding) {
  if (l_max < 0) throw ConfigError("l_max must be nonnegative");
  const So3Quadrature& q = quadrature;
  if (q.n_alpha < 2 * l_max + 1 || q.n_gamma < 2 * l_max + 1)
    throw ConfigError("axial angle counts must be >= 2*l_max+1 for exactness on the band");
  if (q.n_alpha % 2 != 0 || q.n_gamma % 2 != 0)
    throw ConfigError("axial angle counts must be even so the node set is closed under inversion");
  if (q.n_beta < l_max + 1)
    throw ConfigError("middle angle count must be >= l_max+1 for exactness on the band");

  GroupModel g;
  g.kind_ = GroupKind::SO3;
  g.dim_k_ = 3;
  g.so3_quad_ = q;
  g.so3_l_max_ = l_max;
  g.so3_embedding_ = embedding;

  Vector beta_nodes, beta_weights;
  gauss_legendre(q.n_beta, beta_nodes, beta_weights);

  const Index total = static_cast<Index>(q.n_alpha) * q.n_beta * q.n_gamma;
  g.nodes_.reserve(static_cast<std::size_t>(total));
  g.weights_.resize(total);
  Index idx = 0;
  for (int a = 0; a < q.n_alpha; ++a) {
    const Real alpha = kTwoPi * a / q.n_alpha;
    for (int b = 0; b < q.n_beta; ++b) {
      const Real beta = std::acos(beta_nodes[b]);
      for (int c = 0; c < q.n_gamma; ++c) {
        const Real gamma = kTwoPi * c / q.n_gamma;
        Eigen::Vector4d quat =
            quat_multiply(quat_rz(alpha), quat_multiply(quat_ry(beta), quat_rz(gamma)));
        g.nodes_.push_back(GroupElement::quaternion(quat / quat.norm()));
        // Haar density sin(beta) d(alpha) d(beta) d(gamma) / (8*pi^2); the
        // Gauss-Legendre rule integrates d(cos beta) over [-1, 1].
        g.weights_[idx++] = beta_weights[b] / (2.0 * q.n_alpha * q.n_gamma);
      }
    }
  }
  for (int l = 0; l <= l_max; ++l) g.irreps_.push_back({l, 2 * l + 1});
  return g;
}

Complex haar_integrate(const GroupModel& g,
                       const std::function<Complex(const GroupElement&)>& f) {
  Complex acc(0.0, 0.0);
  for (Index t = 0; t < g.quadrature_size(); ++t) acc += g.weight(t) * f(g.node(t));
  return acc;
}

void gauss_legendre(int n, Vector& nodes, Vector& weights) {
  if (n < 1) throw ConfigError("Gauss-Legendre order must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    Real x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    Real dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const Real pn = (n == 1) ? x : p1;
      const Real pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const Real dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[n - 1 - i] = x;
    weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

const char* group_kind_name(GroupKind kind) {
  switch (kind) {
    case GroupKind::Cyclic:
      return "cyclic";
    case GroupKind::SO2:
      return "so2";
    case GroupKind::SO3:
      return "so3";
  }
  return "unknown";
}

}  // namespace kinvlap
