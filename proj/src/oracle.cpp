#include "kinvlap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "kinvlap/errors.hpp"

namespace kinvlap {

Matrix dense_laplacian(const Dataset& dataset, const AffinityParams& params) {
  params.validate();
  const GroupModel& g = dataset.group;
  const Index n = dataset.size();
  const Index q = g.quadrature_size();
  const Index size = n * q;
  if (size > 20000)
    throw ConfigError("augmented vertex count " + std::to_string(size) +
                      " exceeds the dense reference guard of 20000");

  const auto orbit = orbit_points(dataset);
  Matrix flat(size, dataset.ambient_dim());
  Vector w(size);
  for (Index j = 0; j < n; ++j)
    for (Index u = 0; u < q; ++u) {
      flat.row(j * q + u) = orbit[static_cast<std::size_t>(u)].row(j);
      w[j * q + u] = g.weight(u);
    }

  Matrix kernel(size, size);
  for (Index r = 0; r < size; ++r)
    kernel.row(r) = (flat.rowwise() - flat.row(r))
                        .rowwise()
                        .squaredNorm()
                        .unaryExpr([&](Real v) { return std::exp(-v / params.epsilon); })
                        .transpose();
  kernel = 0.5 * (kernel + kernel.transpose()).eval();

  // Vertex (i,t) has degree sum_(j,u) K((i,t),(j,u)) w_u; folding sqrt(w)
  // symmetrically keeps the spectrum of deg - K*diag(w).
  const Vector deg = kernel * w;
  const Vector sqrt_w = w.cwiseSqrt();
  Matrix lap = -(sqrt_w.asDiagonal() * kernel * sqrt_w.asDiagonal());
  lap.diagonal() += deg;
  return lap;
}

std::vector<Real> dense_spectrum(const Dataset& dataset, const AffinityParams& params) {
  const Matrix lap = dense_laplacian(dataset, params);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(lap, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalRuntimeError("dense reference eigensolver failed to converge");
  std::vector<Real> values(solver.eigenvalues().data(),
                           solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(values.begin(), values.end());
  return values;
}

namespace {

/// True when every block value can be injected order-preservingly into the
/// dense list within tol; fills `matched_dense` with the chosen positions.
bool align_within(const std::vector<Real>& dense, const std::vector<Real>& block,
                  Real tol, std::vector<Index>* matched_dense) {
  if (matched_dense) matched_dense->assign(block.size(), -1);
  std::size_t cursor = 0;
  for (std::size_t b = 0; b < block.size(); ++b) {
    while (cursor < dense.size() && dense[cursor] < block[b] - tol) ++cursor;
    if (cursor >= dense.size() || std::abs(dense[cursor] - block[b]) > tol) return false;
    if (matched_dense) (*matched_dense)[b] = static_cast<Index>(cursor);
    ++cursor;
  }
  return true;
}

}  // namespace

SpectraReport compare_spectra(const std::vector<Real>& dense_values,
                              const SpectralBundle& bundle) {
  SpectraReport report;
  std::vector<Real> dense = dense_values;
  std::sort(dense.begin(), dense.end());

  struct Tagged {
    Real value;
    int label;
  };
  std::vector<Tagged> block;
  for (const EigenPair& p : bundle.pairs)
    for (int m = 0; m < p.dim; ++m) block.push_back({p.value, p.label});
  std::sort(block.begin(), block.end(), [](const Tagged& a, const Tagged& b) {
    return a.value < b.value;
  });
  std::vector<Real> block_values(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) block_values[i] = block[i].value;

  if (block.size() > dense.size()) {
    report.unmatched = static_cast<Index>(block.size() - dense.size());
    report.max_abs_dev = std::numeric_limits<Real>::infinity();
    return report;
  }

  std::vector<Index> positions;
  if (block.size() == dense.size()) {
    positions.resize(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) positions[i] = static_cast<Index>(i);
  } else {
    // Bisect the worst deviation of an order-preserving injection.
    Real lo = 0.0;
    Real hi = std::max(dense.back(), block_values.back()) -
              std::min(dense.front(), block_values.front()) + 1.0;
    for (int iter = 0; iter < 80; ++iter) {
      const Real mid = 0.5 * (lo + hi);
      if (align_within(dense, block_values, mid, nullptr))
        hi = mid;
      else
        lo = mid;
    }
    align_within(dense, block_values, hi, &positions);
  }

  report.matched = static_cast<Index>(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) {
    const Real dev = std::abs(block_values[i] - dense[static_cast<std::size_t>(positions[i])]);
    report.max_abs_dev = std::max(report.max_abs_dev, dev);
    auto [it, inserted] = report.per_irrep_dev.try_emplace(block[i].label, dev);
    if (!inserted) it->second = std::max(it->second, dev);
  }
  return report;
}

}  // namespace kinvlap
