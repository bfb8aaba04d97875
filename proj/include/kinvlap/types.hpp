#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace kinvlap {

using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Real = double;
using Complex = std::complex<Real>;

using Matrix = DenseMatrix<Real>;
using ComplexMatrix = DenseMatrix<Complex>;
using Vector = DenseVector<Real>;
using ComplexVector = DenseVector<Complex>;

inline constexpr Real kPi = 3.14159265358979323846;
inline constexpr Real kTwoPi = 2.0 * kPi;

}  // namespace kinvlap
