#pragma once

#include <vector>

#include "kinvlap/harmonic.hpp"
#include "kinvlap/types.hpp"

namespace kinvlap {

/// One eigenvalue-eigenvector pair of a shifted block. Every pair stands for
/// dim copies of the eigenvalue in the operator spectrum, one per row index
/// m of the representation.
struct EigenPair {
  int label = 0;
  int dim = 1;
  int s = 1;  // 1-based position within the block, ascending eigenvalue
  Real value = 0.0;
  ComplexVector vector;
  bool normalized = false;
};

/// Full spectrum across irreps, sorted ascending by eigenvalue with ties
/// broken by (label, s). Each entry contributes dim eigenfunctions.
struct SpectralBundle {
  std::vector<EigenPair> pairs;
  bool normalized = false;

  /// Eigenvalues expanded by their m-multiplicity, sorted ascending.
  std::vector<Real> expanded_eigenvalues() const;
};

/// Eigendecomposition of one shifted block. The plain block is Hermitian and
/// solved directly (orthonormal eigenvectors, nonnegative eigenvalues); the
/// normalized block is conjugated by deg^(1/2) to a Hermitian problem and
/// the eigenvectors are mapped back, so its eigenvalues are exactly real.
std::vector<EigenPair> eigensolve_block(const ShiftedBlock& block);

/// Eigenfunction on {1..N} x K synthesized from a block eigenvector:
/// value(i, k) = sum_n U_l(k)_{m,n} v[(i-1)*dim + n], with 1-based row m.
class EigenFunction {
 public:
  EigenFunction(const EigenPair& pair, int m, const GroupModel& group);

  Complex operator()(Index i, const GroupElement& k) const;
  /// Values at every (point, quadrature node); the natural sampled form.
  ComplexMatrix sample() const;

  int label() const { return pair_.label; }
  int m() const { return m_; }
  Real eigenvalue() const { return pair_.value; }

 private:
  EigenPair pair_;
  int m_;
  const GroupModel* group_;
};

EigenFunction synthesize_eigenfunction(const EigenPair& pair, int m, const GroupModel& group);

/// Assembles, shifts, and solves every irrep of the dataset's group, then
/// merges into one deterministic ordering.
SpectralBundle full_spectrum(const Dataset& dataset, const AffinityParams& params,
                             bool normalized);

/// Same, reusing blocks that are already assembled.
SpectralBundle full_spectrum(const std::vector<IrrepBlock>& blocks, bool normalized);

}  // namespace kinvlap
