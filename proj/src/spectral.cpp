#include "kinvlap/spectral.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "kinvlap/errors.hpp"
#include "kinvlap/parallel.hpp"

namespace kinvlap {

std::vector<Real> SpectralBundle::expanded_eigenvalues() const {
  std::vector<Real> values;
  for (const EigenPair& p : pairs)
    values.insert(values.end(), static_cast<std::size_t>(p.dim), p.value);
  std::sort(values.begin(), values.end());
  return values;
}

std::vector<EigenPair> eigensolve_block(const ShiftedBlock& block) {
  const Index n = block.degree.size();
  const int d = block.dim;
  const Index size = n * d;

  ComplexMatrix hermitian;
  if (block.normalized) {
    // deg^(1/2) (I - (deg^-1 x I) W_hat) deg^(-1/2) is Hermitian; solve that
    // and map the eigenvectors back with deg^(-1/2).
    hermitian = block.s;
    for (Index i = 0; i < n; ++i) {
      const Real sq = std::sqrt(block.degree[i]);
      hermitian.middleRows(i * d, d) *= sq;
      hermitian.middleCols(i * d, d) /= sq;
    }
    hermitian = 0.5 * (hermitian + hermitian.adjoint()).eval();
  } else {
    hermitian = block.s;
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success)
    throw NumericalRuntimeError("eigensolver failed to converge on irrep block " +
                                std::to_string(block.label));

  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(size));
  for (Index s = 0; s < size; ++s) {
    EigenPair p;
    p.label = block.label;
    p.dim = d;
    p.s = static_cast<int>(s) + 1;
    p.value = solver.eigenvalues()[s];
    p.vector = solver.eigenvectors().col(s);
    p.normalized = block.normalized;
    if (block.normalized) {
      for (Index i = 0; i < n; ++i)
        p.vector.segment(i * d, d) /= std::sqrt(block.degree[i]);
      p.vector /= p.vector.norm();
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

EigenFunction::EigenFunction(const EigenPair& pair, int m, const GroupModel& group)
    : pair_(pair), m_(m), group_(&group) {
  if (m < 1 || m > pair.dim)
    throw ConfigError("eigenfunction row index m=" + std::to_string(m) +
                      " is out of range 1.." + std::to_string(pair.dim));
}

Complex EigenFunction::operator()(Index i, const GroupElement& k) const {
  const ComplexMatrix u = group_->irrep_matrix(group_->irrep_index(pair_.label), k);
  Complex acc(0.0, 0.0);
  for (int nn = 0; nn < pair_.dim; ++nn)
    acc += u(m_ - 1, nn) * pair_.vector[i * pair_.dim + nn];
  return acc;
}

ComplexMatrix EigenFunction::sample() const {
  const Index q = group_->quadrature_size();
  const Index n = pair_.vector.size() / pair_.dim;
  const ComplexMatrix stack = group_->irrep_node_stack(group_->irrep_index(pair_.label));
  ComplexMatrix values(n, q);
  for (Index t = 0; t < q; ++t) {
    for (Index i = 0; i < n; ++i) {
      Complex acc(0.0, 0.0);
      for (int nn = 0; nn < pair_.dim; ++nn)
        acc += stack(t, (m_ - 1) * pair_.dim + nn) * pair_.vector[i * pair_.dim + nn];
      values(i, t) = acc;
    }
  }
  return values;
}

EigenFunction synthesize_eigenfunction(const EigenPair& pair, int m,
                                       const GroupModel& group) {
  return EigenFunction(pair, m, group);
}

SpectralBundle full_spectrum(const std::vector<IrrepBlock>& blocks, bool normalized) {
  SpectralBundle bundle;
  bundle.normalized = normalized;
  std::vector<std::vector<EigenPair>> per_block(blocks.size());
  parallel_for(static_cast<Index>(blocks.size()), [&](Index begin, Index end) {
    for (Index b = begin; b < end; ++b)
      per_block[static_cast<std::size_t>(b)] =
          eigensolve_block(shift_block(blocks[static_cast<std::size_t>(b)], normalized));
  });
  for (auto& part : per_block)
    bundle.pairs.insert(bundle.pairs.end(), std::make_move_iterator(part.begin()),
                        std::make_move_iterator(part.end()));
  std::stable_sort(bundle.pairs.begin(), bundle.pairs.end(),
                   [](const EigenPair& a, const EigenPair& b) {
                     if (a.value != b.value) return a.value < b.value;
                     if (a.label != b.label) return a.label < b.label;
                     return a.s < b.s;
                   });
  return bundle;
}

SpectralBundle full_spectrum(const Dataset& dataset, const AffinityParams& params,
                             bool normalized) {
  return full_spectrum(assemble_blocks(dataset, params), normalized);
}

}  // namespace kinvlap
