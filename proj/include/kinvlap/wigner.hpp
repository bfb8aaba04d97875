#pragma once

#include <vector>

#include "kinvlap/types.hpp"

namespace kinvlap {

/// Unitary change of basis from Cartesian (x, y, z) to spherical components,
/// rows ordered m = -1, 0, +1. Conjugating a rotation matrix by this map
/// yields the three-dimensional irreducible representation of the rotation
/// group in the spherical basis.
Eigen::Matrix3cd spherical_basis_map();

/// Clebsch-Gordan coefficient <l-1, M-mu; 1, mu | l, M> for the top coupling
/// (l-1) x 1 -> l, mu in {-1, 0, +1}. Zero outside the valid index range.
Real cg_top_coupling(int l, int big_m, int mu);

/// Representation matrices of the rotation group for degrees 0..l_max,
/// evaluated at the rotation R. Degree l has size (2l+1) x (2l+1), with rows
/// and columns indexed by m = -l..l in ascending order. Built by projecting
/// the product of the degree-(l-1) and degree-1 matrices onto the degree-l
/// component, which makes every matrix exactly unitary and multiplicative up
/// to rounding.
std::vector<ComplexMatrix> wigner_stack(const Eigen::Matrix3d& rotation, int l_max);

}  // namespace kinvlap
