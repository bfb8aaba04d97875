#pragma once

#include <map>
#include <vector>

#include "kinvlap/affinity.hpp"
#include "kinvlap/dataset.hpp"
#include "kinvlap/spectral.hpp"
#include "kinvlap/types.hpp"

namespace kinvlap {

/// Brute-force reference: the dense Laplacian on the fully augmented vertex
/// set {node_t * x_i}, with the quadrature weights folded into the affinity
/// so the matrix represents the same integral operator as the block method.
/// Returned in the weight-symmetrized similarity form, which shares its
/// spectrum with the plain operator and is exactly real symmetric. Guarded
/// at N*Q <= 20000.
Matrix dense_laplacian(const Dataset& dataset, const AffinityParams& params);

/// Eigenvalues of the dense reference, ascending.
std::vector<Real> dense_spectrum(const Dataset& dataset, const AffinityParams& params);

struct SpectraReport {
  Real max_abs_dev = 0.0;
  Index matched = 0;
  Index unmatched = 0;
  std::map<int, Real> per_irrep_dev;
};

/// Matches the block-method eigenvalue multiset (expanded by m-multiplicity)
/// against the dense spectrum. Equal-size multisets compare elementwise
/// after sorting, which is the optimal one-dimensional assignment; when the
/// dense side is larger (truncated band on a rotation group) an
/// order-preserving injection minimizing the worst deviation is found by
/// bisection.
SpectraReport compare_spectra(const std::vector<Real>& dense_values,
                              const SpectralBundle& bundle);

}  // namespace kinvlap
