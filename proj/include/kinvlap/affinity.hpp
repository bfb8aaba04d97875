#pragma once

#include <vector>

#include "kinvlap/dataset.hpp"
#include "kinvlap/types.hpp"

namespace kinvlap {

/// Gaussian kernel bandwidth, in units of squared ambient distance.
struct AffinityParams {
  Real epsilon = 1.0;

  void validate() const;
};

/// All group-translated copies of the sample, one N x D matrix per
/// quadrature node t holding node_t * x_j in row j. Shared by the block
/// assembly, the operator application, and the convergence estimators.
std::vector<Matrix> orbit_points(const Dataset& dataset);

/// Pairwise affinity exp(-|k*x_i - l*x_j|^2 / epsilon) in (0, 1].
Real affinity(const Eigen::Ref<const Vector>& x_i, const Eigen::Ref<const Vector>& x_j,
              const GroupElement& k, const GroupElement& l, const GroupModel& group,
              const AffinityParams& params);

/// The one-argument profile k -> exp(-|x_i - k*x_j|^2 / epsilon) sampled at
/// every quadrature node. Isometry of the action makes this single profile
/// determine the affinity for every pair of group arguments.
Vector affinity_profile(const Eigen::Ref<const Vector>& x_i,
                        const Eigen::Ref<const Vector>& x_j, const GroupModel& group,
                        const AffinityParams& params);

/// Entries of the constant diagonal degree matrix: entry i is the quadrature
/// Haar integral over the second group argument of the affinity, summed over
/// all points j. Strictly positive.
Vector degree(const Dataset& dataset, const AffinityParams& params);

/// Degree of point i computed with the first group argument pinned to kappa
/// instead of the identity; equal to degree()[i] up to quadrature exactness.
Real degree_at(const Dataset& dataset, const AffinityParams& params, Index i,
               const GroupElement& kappa);

/// Median of the squared pairwise distances between raw sample points; the
/// default bandwidth heuristic. Throws ConfigError for fewer than two points.
Real median_squared_distance(const Dataset& dataset);

}  // namespace kinvlap
