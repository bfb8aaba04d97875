#pragma once

#include <functional>
#include <utility>

#include "kinvlap/affinity.hpp"
#include "kinvlap/dataset.hpp"
#include "kinvlap/types.hpp"

namespace kinvlap {

/// Function on {1..N} x K sampled at the group's quadrature nodes:
/// values(i, t) = f(i, node_t). The same rule serves integration over the
/// second group argument and sampling over the first; mixing rules would
/// alias silently, so shape mismatches are rejected.
struct GammaFunction {
  ComplexMatrix values;  // N x Q

  Index n_points() const { return values.rows(); }
  Index n_nodes() const { return values.cols(); }
};

/// Direct quadrature application of the affinity operator:
/// (Wf)(i, t) = sum_j sum_u w_u exp(-|node_t*x_i - node_u*x_j|^2/eps) f(j, u).
GammaFunction apply_w(const GammaFunction& f, const Dataset& dataset,
                      const AffinityParams& params);

/// Graph Laplacian action deg*f - W*f with the constant diagonal degree.
GammaFunction apply_laplacian(const GammaFunction& f, const Dataset& dataset,
                              const AffinityParams& params);

/// Normalized Laplacian action: entrywise division by the degree after
/// apply_laplacian. Annihilates constants.
GammaFunction apply_normalized_laplacian(const GammaFunction& f, const Dataset& dataset,
                                         const AffinityParams& params);

/// Quadrature inner product sum_i int conj(g) f on the sampled functions.
Complex gamma_inner_product(const GammaFunction& g, const GammaFunction& f,
                            const GroupModel& group);

Real gamma_norm(const GammaFunction& f, const GroupModel& group);

/// Kernel-weighted orbit integrals of an ambient function at the probe point
/// x, anchored at kappa * x_i:
///   F = int_K exp(-|kappa*x_i - lambda*x|^2/eps) f(lambda*x) d(lambda)
///   G = the same with f = 1.
std::pair<Real, Real> estimate_fg(Index i, const GroupElement& kappa,
                                  const Eigen::Ref<const Vector>& x,
                                  const std::function<Real(const Eigen::Ref<const Vector>&)>& f_ambient,
                                  const Dataset& dataset, const AffinityParams& params);

}  // namespace kinvlap
