#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "kinvlap/affinity.hpp"
#include "kinvlap/dataset.hpp"
#include "kinvlap/types.hpp"

namespace kinvlap {

/// Pointwise Laplace-Beltrami estimate at kappa * x_i:
/// (4/eps) * [ f(kappa*x_i) - (sum_j F_{i,kappa}(x_j)) / (sum_j G_{i,kappa}(x_j)) ],
/// optionally excluding the j = i terms. Throws NumericalRuntimeError when
/// the denominator underflows (all orbit integrals below 1e-300).
Real pointwise_estimate(const Dataset& dataset, const AffinityParams& params,
                        const TestFunction& fn, Index i, const GroupElement& kappa,
                        bool exclude_diagonal);

/// Classical estimate on the raw points, without orbit augmentation; the
/// trivial-group pipeline applied to the same dataset.
Real baseline_vanilla_laplacian(const Dataset& dataset, const AffinityParams& params,
                                const TestFunction& fn, Index i);

/// Sampler dispatch for the synthetic manifolds by name.
Dataset sample_manifold(const std::string& name, const std::vector<Real>& params,
                        Index n_points, std::uint64_t seed, int quadrature_order);

/// Shared per-dataset caches (orbit copies and ambient function values) so
/// that one sampled dataset can be evaluated at many bandwidths cheaply.
class OrbitEvaluator {
 public:
  OrbitEvaluator(Dataset dataset, const TestFunction& fn);

  /// Estimate at kappa = Id anchored at sample point i.
  Real estimate(Index i, Real epsilon, bool exclude_diagonal) const;
  /// Estimate anchored at an arbitrary ambient point (no diagonal term).
  Real estimate_at(const Eigen::Ref<const Vector>& anchor, Real f_at_anchor,
                   Real epsilon) const;
  /// Closed-form operator value at sample point i.
  Real reference(Index i) const;

  const Dataset& dataset() const { return dataset_; }

 private:
  Dataset dataset_;
  TestFunction fn_;
  std::vector<Matrix> orbit_;
  Matrix ambient_values_;  // Q x N, entry (u, j) = f(node_u * x_j)
};

struct BiasSurrogate {
  bool enabled = true;
  int grid = 128;               // grid points per angle on the parameter grid
  std::vector<Real> epsilons;   // bandwidths swept for the bias fit
};

struct ConvergenceConfig {
  std::string manifold = "torus_r4";
  std::vector<Real> manifold_params = {1.0, 1.0};
  int quadrature_order = 64;
  std::vector<Index> n_values;
  std::vector<Real> epsilons;
  int trials = 1;
  std::uint64_t seed = 1;
  bool exclude_diagonal = false;
  Index eval_points = 32;
  bool baseline = true;
  std::string test_function = "x3";
  BiasSurrogate bias;

  void validate() const;
};

struct CellStats {
  Index n_points = 0;
  Real epsilon = 0.0;
  int trials = 0;
  Real mean_abs_err = 0.0;
  Real median_abs_err = 0.0;
  Real q25_abs_err = 0.0;
  Real q75_abs_err = 0.0;
  Real baseline_median_abs_err = std::numeric_limits<Real>::quiet_NaN();
  Real bias_reference = std::numeric_limits<Real>::quiet_NaN();
  std::string regime = "unknown";  // variance | bias | mixed | unknown
  /// Median absolute error of each trial, aware then baseline.
  std::vector<Real> trial_medians;
  std::vector<Real> baseline_trial_medians;
};

struct SlopeFit {
  bool valid = false;
  Real slope = std::numeric_limits<Real>::quiet_NaN();
  Real intercept = std::numeric_limits<Real>::quiet_NaN();
  Real ci_lo = std::numeric_limits<Real>::quiet_NaN();
  Real ci_hi = std::numeric_limits<Real>::quiet_NaN();
  int points_used = 0;
};

struct RateReport {
  std::vector<CellStats> cells;  // ordered by (n, epsilon) as configured
  std::map<Real, SlopeFit> slope_vs_n;          // per epsilon, regime-filtered
  std::map<Real, SlopeFit> slope_vs_n_allcells; // per epsilon, unfiltered
  std::map<Index, SlopeFit> slope_vs_eps;       // per N, variance cells
  SlopeFit bias_slope;
  std::vector<std::pair<Real, Real>> surrogate_errors;  // (epsilon, median abs err)
  Real cell_win_fraction = std::numeric_limits<Real>::quiet_NaN();
  Real trial_win_fraction = std::numeric_limits<Real>::quiet_NaN();
};

/// Monte-Carlo sweep over the (N, epsilon) grid with paired symmetry-unaware
/// baselines and log-log slope fits (least squares, cluster bootstrap CIs).
RateReport run_sweep(const ConvergenceConfig& config);

/// Least-squares slope of y against x in log-log coordinates.
SlopeFit fit_loglog(const std::vector<Real>& x, const std::vector<Real>& y);

}  // namespace kinvlap
