#pragma once

#include <vector>

#include "kinvlap/affinity.hpp"
#include "kinvlap/dataset.hpp"
#include "kinvlap/types.hpp"

namespace kinvlap {

/// Per-irrep Fourier block of the affinity: an N*dim x N*dim Hermitian
/// matrix whose (i, j) block holds the quadrature Fourier coefficient of the
/// profile k -> W_ij(Id, k) against the unconjugated representation entries.
struct IrrepBlock {
  int label = 0;
  int dim = 1;
  ComplexMatrix w_hat;
  Vector degree;
  /// Max absolute deviation from Hermitian symmetry before symmetrization;
  /// kept as a quality metric.
  Real hermiticity_deviation = 0.0;
};

/// Shifted block whose spectrum carries the graph Laplacian: either
/// deg x I - W_hat (Hermitian, positive semidefinite) or
/// I - (deg^-1 x I) W_hat (similar to Hermitian, real spectrum).
struct ShiftedBlock {
  int label = 0;
  int dim = 1;
  ComplexMatrix s;
  Vector degree;
  bool normalized = false;
};

/// Quadrature Fourier coefficient matrix of the (i, j) affinity profile at
/// one irrep label; entry (m, n) integrates profile * U_l(k)_{mn}.
ComplexMatrix fourier_block(Index i, Index j, int label, const Dataset& dataset,
                            const AffinityParams& params);

/// Assembles the full block matrix for one irrep, verifying Hermitian
/// symmetry (hard error above 1e-6 deviation, which signals a broken
/// quadrature or representation evaluator) and then symmetrizing exactly.
IrrepBlock assemble_block(int label, const Dataset& dataset, const AffinityParams& params);

/// All irreps of the dataset's group in one pass over the pairwise profiles;
/// considerably cheaper than assembling one block at a time.
std::vector<IrrepBlock> assemble_blocks(const Dataset& dataset, const AffinityParams& params);

ShiftedBlock shift_block(const IrrepBlock& block, bool normalized);

/// Inverse Fourier synthesis of the (i, j) profile on the quadrature nodes
/// from the per-irrep coefficient blocks: sum over irreps of
/// dim * trace(W_hat_ij * U_l(k^-1)). Exact on finite groups; truncation-
/// limited on the rotation groups.
Vector reconstruct_profile(const std::vector<IrrepBlock>& blocks, Index i, Index j,
                           const Dataset& dataset);

/// Measured reconstruction quality over probe pairs (the sharpest profiles
/// in the dataset), together with a conservative declared bound on the sup
/// error of the truncated synthesis.
struct TailReport {
  Real measured_max_residual = 0.0;
  Real declared_bound = 0.0;
  int band_limit = 0;
};

TailReport reconstruction_report(const std::vector<IrrepBlock>& blocks,
                                 const Dataset& dataset, const AffinityParams& params);

/// Smallest band limit whose measured reconstruction residual over probe
/// pairs stays below tol; used as the default truncation policy for the
/// rotation groups. Finite groups return their full index set unchanged.
int suggest_band_limit(const Dataset& dataset, const AffinityParams& params,
                       Real tol = 1e-6, int hard_cap = 64);

}  // namespace kinvlap
