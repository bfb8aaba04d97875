#include "kinvlap/affinity.hpp"

#include <algorithm>
#include <cmath>

#include "kinvlap/errors.hpp"

namespace kinvlap {

void AffinityParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw ConfigError("kernel bandwidth epsilon must be positive and finite");
}

std::vector<Matrix> orbit_points(const Dataset& dataset) {
  const GroupModel& g = dataset.group;
  std::vector<Matrix> orbit;
  orbit.reserve(static_cast<std::size_t>(g.quadrature_size()));
  for (Index t = 0; t < g.quadrature_size(); ++t)
    orbit.push_back(g.act_points(g.node(t), dataset.points));
  return orbit;
}

Real affinity(const Eigen::Ref<const Vector>& x_i, const Eigen::Ref<const Vector>& x_j,
              const GroupElement& k, const GroupElement& l, const GroupModel& group,
              const AffinityParams& params) {
  params.validate();
  const Vector a = group.act(k, x_i);
  const Vector b = group.act(l, x_j);
  return std::exp(-(a - b).squaredNorm() / params.epsilon);
}

Vector affinity_profile(const Eigen::Ref<const Vector>& x_i,
                        const Eigen::Ref<const Vector>& x_j, const GroupModel& group,
                        const AffinityParams& params) {
  params.validate();
  const Index q = group.quadrature_size();
  Vector profile(q);
  for (Index t = 0; t < q; ++t) {
    const Vector y = group.act(group.node(t), x_j);
    profile[t] = std::exp(-(x_i - y).squaredNorm() / params.epsilon);
  }
  return profile;
}

Vector degree(const Dataset& dataset, const AffinityParams& params) {
  params.validate();
  const GroupModel& g = dataset.group;
  const Index n = dataset.size();
  const auto orbit = orbit_points(dataset);
  Vector deg = Vector::Zero(n);
  for (Index t = 0; t < g.quadrature_size(); ++t) {
    const Real w = g.weight(t);
    for (Index i = 0; i < n; ++i) {
      const Real mass = (orbit[static_cast<std::size_t>(t)].rowwise() -
                         dataset.points.row(i))
                            .rowwise()
                            .squaredNorm()
                            .unaryExpr([&](Real v) { return std::exp(-v / params.epsilon); })
                            .sum();
      deg[i] += w * mass;
    }
  }
  return deg;
}

Real degree_at(const Dataset& dataset, const AffinityParams& params, Index i,
               const GroupElement& kappa) {
  params.validate();
  const GroupModel& g = dataset.group;
  const Vector a = g.act(kappa, dataset.points.row(i).transpose());
  Real acc = 0.0;
  for (Index t = 0; t < g.quadrature_size(); ++t) {
    const Matrix moved = g.act_points(g.node(t), dataset.points);
    acc += g.weight(t) *
           (moved.rowwise() - a.transpose())
               .rowwise()
               .squaredNorm()
               .unaryExpr([&](Real v) { return std::exp(-v / params.epsilon); })
               .sum();
  }
  return acc;
}

Real median_squared_distance(const Dataset& dataset) {
  const Index n = dataset.size();
  if (n < 2)
    throw ConfigError("bandwidth heuristic needs at least two points; pass epsilon explicitly");
  std::vector<Real> d2;
  d2.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      d2.push_back((dataset.points.row(i) - dataset.points.row(j)).squaredNorm());
  const std::size_t mid = d2.size() / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
  Real med = d2[mid];
  if (d2.size() % 2 == 0) {
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                     d2.begin() + static_cast<std::ptrdiff_t>(mid));
    med = 0.5 * (med + d2[mid - 1]);
  }
  return med;
}

}  // namespace kinvlap
