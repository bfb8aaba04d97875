#include "kinvlap/wigner.hpp"

#include <cmath>

#include "kinvlap/errors.hpp"

namespace kinvlap {

Eigen::Matrix3cd spherical_basis_map() {
  const Real s = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  Eigen::Matrix3cd c;
  c.row(0) << s, i * s, 0.0;   // m = -1
  c.row(1) << 0.0, 0.0, 1.0;   // m =  0
  c.row(2) << -s, i * s, 0.0;  // m = +1
  return c;
}

Real cg_top_coupling(int l, int big_m, int mu) {
  const Real j = static_cast<Real>(l - 1);
  const Real m = static_cast<Real>(big_m);
  // m1 = M - mu must lie in [-(l-1), l-1].
  if (std::abs(big_m - mu) > l - 1) return 0.0;
  Real num = 0.0, den = 1.0;
  switch (mu) {
    case +1:
      num = (j + m) * (j + m + 1.0);
      den = (2.0 * j + 1.0) * (2.0 * j + 2.0);
      break;
    case 0:
      num = (j - m + 1.0) * (j + m + 1.0);
      den = (2.0 * j + 1.0) * (j + 1.0);
      break;
    case -1:
      num = (j - m) * (j - m + 1.0);
      den = (2.0 * j + 1.0) * (2.0 * j + 2.0);
      break;
    default:
      throw Error("cg_top_coupling: mu must be -1, 0 or +1");
  }
  if (num <= 0.0) return 0.0;
  return std::sqrt(num / den);
}

std::vector<ComplexMatrix> wigner_stack(const Eigen::Matrix3d& rotation, int l_max) {
  if (l_max < 0) throw Error("wigner_stack: l_max must be nonnegative");
  std::vector<ComplexMatrix> stack;
  stack.reserve(static_cast<std::size_t>(l_max) + 1);

  stack.push_back(ComplexMatrix::Constant(1, 1, Complex(1.0, 0.0)));
  if (l_max == 0) return stack;

  const Eigen::Matrix3cd c = spherical_basis_map();
  const Eigen::Matrix3cd d1 = c * rotation.cast<Complex>() * c.adjoint();
  stack.push_back(d1);

  for (int l = 2; l <= l_max; ++l) {
    const ComplexMatrix& prev = stack[static_cast<std::size_t>(l) - 1];
    const int dim = 2 * l + 1;
    ComplexMatrix cur(dim, dim);
    for (int big_m = -l; big_m <= l; ++big_m) {
      for (int big_n = -l; big_n <= l; ++big_n) {
        Complex acc(0.0, 0.0);
        for (int mu = -1; mu <= 1; ++mu) {
          const Real cm = cg_top_coupling(l, big_m, mu);
          if (cm == 0.0) continue;
          for (int nu = -1; nu <= 1; ++nu) {
            const Real cn = cg_top_coupling(l, big_n, nu);
            if (cn == 0.0) continue;
            acc += cm * cn * prev(big_m - mu + l - 1, big_n - nu + l - 1) *
                   d1(mu + 1, nu + 1);
          }
        }
        cur(big_m + l, big_n + l) = acc;
      }
    }
    stack.push_back(std::move(cur));
  }
  return stack;
}

}  // namespace kinvlap
