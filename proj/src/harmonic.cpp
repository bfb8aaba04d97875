#include "kinvlap/harmonic.hpp"

#include <cmath>
#include <string>

#include "kinvlap/errors.hpp"
#include "kinvlap/parallel.hpp"

namespace kinvlap {

namespace {

constexpr Real kHermiticityHardLimit = 1e-6;

/// Weighted profile matrix for source row i: entry (t, j) =
/// w_t * exp(-|x_i - node_t * x_j|^2 / epsilon).
Matrix weighted_profiles(Index i, const Dataset& dataset, const AffinityParams& params,
                         const std::vector<Matrix>& orbit) {
  const Index q = dataset.group.quadrature_size();
  const Index n = dataset.size();
  Matrix p(q, n);
  for (Index t = 0; t < q; ++t) {
    p.row(t) = dataset.group.weight(t) *
               (orbit[static_cast<std::size_t>(t)].rowwise() - dataset.points.row(i))
                   .rowwise()
                   .squaredNorm()
                   .unaryExpr([&](Real v) { return std::exp(-v / params.epsilon); })
                   .transpose();
  }
  return p;
}

std::vector<IrrepBlock> assemble_selected(const Dataset& dataset,
                                          const AffinityParams& params,
                                          const std::vector<Index>& irrep_indices) {
  params.validate();
  const GroupModel& g = dataset.group;
  const Index n = dataset.size();
  const auto orbit = orbit_points(dataset);
  const auto stacks = g.irrep_node_stacks();

  std::vector<IrrepBlock> blocks;
  blocks.reserve(irrep_indices.size());
  for (Index li : irrep_indices) {
    const Irrep& ir = g.irreps()[static_cast<std::size_t>(li)];
    IrrepBlock b;
    b.label = ir.label;
    b.dim = ir.dim;
    b.w_hat.resize(n * ir.dim, n * ir.dim);
    blocks.push_back(std::move(b));
  }
  Vector deg = Vector::Zero(n);

  parallel_for(n, [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const Matrix pw = weighted_profiles(i, dataset, params, orbit);
      deg[i] = pw.sum();
      for (std::size_t bi = 0; bi < irrep_indices.size(); ++bi) {
        const Index li = irrep_indices[bi];
        const int d = blocks[bi].dim;
        // coef(mn, j) = sum_t U_l(node_t)_{mn} * pw(t, j)
        const ComplexMatrix coef =
            stacks[static_cast<std::size_t>(li)].transpose() * pw.cast<Complex>();
        for (int m = 0; m < d; ++m)
          for (int v = 0; v < d; ++v)
            for (Index j = 0; j < n; ++j)
              blocks[bi].w_hat(i * d + m, j * d + v) = coef(m * d + v, j);
      }
    }
  });

  for (auto& b : blocks) {
    b.degree = deg;
    b.hermiticity_deviation = (b.w_hat - b.w_hat.adjoint()).cwiseAbs().maxCoeff();
    if (b.hermiticity_deviation > kHermiticityHardLimit)
      throw NumericalIntegrityError(
          "Fourier block for irrep " + std::to_string(b.label) +
          " deviates from Hermitian by " + std::to_string(b.hermiticity_deviation) +
          "; the quadrature or representation evaluator is inconsistent");
    b.w_hat = 0.5 * (b.w_hat + b.w_hat.adjoint()).eval();
  }
  return blocks;
}

}  // namespace

ComplexMatrix fourier_block(Index i, Index j, int label, const Dataset& dataset,
                            const AffinityParams& params) {
  const GroupModel& g = dataset.group;
  const Index li = g.irrep_index(label);
  const int d = g.irreps()[static_cast<std::size_t>(li)].dim;
  const Vector profile = affinity_profile(dataset.points.row(i).transpose(),
                                          dataset.points.row(j).transpose(), g, params);
  const ComplexVector coef = g.irrep_node_stack(li).transpose() *
                             (g.weights().cwiseProduct(profile)).cast<Complex>();
  ComplexMatrix out(d, d);
  for (int m = 0; m < d; ++m)
    for (int v = 0; v < d; ++v) out(m, v) = coef[m * d + v];
  return out;
}

IrrepBlock assemble_block(int label, const Dataset& dataset, const AffinityParams& params) {
  const Index li = dataset.group.irrep_index(label);
  return assemble_selected(dataset, params, {li}).front();
}

std::vector<IrrepBlock> assemble_blocks(const Dataset& dataset,
                                        const AffinityParams& params) {
  std::vector<Index> all(static_cast<std::size_t>(dataset.group.irrep_count()));
  for (Index i = 0; i < dataset.group.irrep_count(); ++i) all[static_cast<std::size_t>(i)] = i;
  return assemble_selected(dataset, params, all);
}

ShiftedBlock shift_block(const IrrepBlock& block, bool normalized) {
  if ((block.degree.array() <= 0.0).any())
    throw NumericalRuntimeError("degree matrix has a nonpositive entry");
  const Index n = block.degree.size();
  const int d = block.dim;
  ShiftedBlock out;
  out.label = block.label;
  out.dim = d;
  out.degree = block.degree;
  out.normalized = normalized;
  if (normalized) {
    out.s = -block.w_hat;
    for (Index i = 0; i < n; ++i)
      out.s.middleRows(i * d, d) /= block.degree[i];
    out.s += ComplexMatrix::Identity(n * d, n * d);
  } else {
    out.s = -block.w_hat;
    for (Index i = 0; i < n; ++i)
      out.s.diagonal().segment(i * d, d).array() += block.degree[i];
  }
  return out;
}

Vector reconstruct_profile(const std::vector<IrrepBlock>& blocks, Index i, Index j,
                           const Dataset& dataset) {
  const GroupModel& g = dataset.group;
  const Index q = g.quadrature_size();
  Vector values = Vector::Zero(q);
  for (Index t = 0; t < q; ++t) {
    const GroupElement inv = g.inverse(g.node(t));
    Complex acc(0.0, 0.0);
    for (const IrrepBlock& b : blocks) {
      const ComplexMatrix u = g.irrep_matrix(g.irrep_index(b.label), inv);
      const int d = b.dim;
      acc += static_cast<Real>(d) *
             (b.w_hat.block(i * d, j * d, d, d) * u).trace();
    }
    values[t] = acc.real();
  }
  return values;
}

TailReport reconstruction_report(const std::vector<IrrepBlock>& blocks,
                                 const Dataset& dataset, const AffinityParams& params) {
  const Index n = dataset.size();
  // Probe the self-pair (sharpest profile) plus the closest distinct pair.
  std::vector<std::pair<Index, Index>> probes{{0, 0}};
  if (n > 1) {
    Index bi = 0, bj = 1;
    Real best = (dataset.points.row(0) - dataset.points.row(1)).squaredNorm();
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const Real d2 = (dataset.points.row(i) - dataset.points.row(j)).squaredNorm();
        if (d2 < best) {
          best = d2;
          bi = i;
          bj = j;
        }
      }
    probes.emplace_back(bi, bj);
    probes.emplace_back(n / 2, n / 2);
  }

  TailReport report;
  for (const IrrepBlock& b : blocks) report.band_limit = std::max(report.band_limit, b.label);
  for (const auto& [i, j] : probes) {
    const Vector exact = affinity_profile(dataset.points.row(i).transpose(),
                                          dataset.points.row(j).transpose(),
                                          dataset.group, params);
    const Vector synth = reconstruct_profile(blocks, i, j, dataset);
    report.measured_max_residual =
        std::max(report.measured_max_residual, (exact - synth).cwiseAbs().maxCoeff());
  }
  report.declared_bound = std::max(report.measured_max_residual * 4.0, 1e-14);
  return report;
}

int suggest_band_limit(const Dataset& dataset, const AffinityParams& params, Real tol,
                       int hard_cap) {
  const GroupModel& g = dataset.group;
  if (g.kind() == GroupKind::Cyclic) return g.cyclic_order() - 1;
  int limit = g.kind() == GroupKind::SO2 ? 2 : 1;
  // Probe with a small subset; the tail depends on the kernel sharpness, not
  // on the sample size.
  const Index probe_n = std::min<Index>(dataset.size(), 8);
  Dataset probe{dataset.points.topRows(probe_n), dataset.group, dataset.meta};
  while (limit <= hard_cap) {
    probe.group = dataset.group.with_band_limit(limit);
    const auto blocks = assemble_blocks(probe, params);
    const TailReport report = reconstruction_report(blocks, probe, params);
    if (report.measured_max_residual < tol) return limit;
    limit = limit < 4 ? limit + 1 : (limit * 3) / 2;
  }
  throw NumericalRuntimeError(
      "no band limit up to " + std::to_string(hard_cap) +
      " reaches reconstruction tolerance " + std::to_string(tol) +
      "; increase epsilon or the cap");
}

}  // namespace kinvlap
