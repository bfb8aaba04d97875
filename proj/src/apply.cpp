#include "kinvlap/apply.hpp"

#include <cmath>

#include "kinvlap/errors.hpp"
#include "kinvlap/parallel.hpp"

namespace kinvlap {

namespace {

void check_shape(const GammaFunction& f, const Dataset& dataset) {
  if (f.n_points() != dataset.size() ||
      f.n_nodes() != dataset.group.quadrature_size())
    throw ConfigError("sampled function shape does not match the dataset's quadrature");
  if (!f.values.allFinite())
    throw ConfigError("sampled function has non-finite entries");
}

}  // namespace

GammaFunction apply_w(const GammaFunction& f, const Dataset& dataset,
                      const AffinityParams& params) {
  params.validate();
  check_shape(f, dataset);
  const GroupModel& g = dataset.group;
  const Index n = dataset.size();
  const Index q = g.quadrature_size();

  // Flatten the augmented vertex set node_u * x_j once; the isometry of the
  // action turns W_ij(node_t, node_u) into a plain pairwise kernel on it.
  const auto orbit = orbit_points(dataset);
  Matrix flat(n * q, dataset.ambient_dim());
  ComplexVector weighted_f(n * q);
  for (Index u = 0; u < q; ++u)
    for (Index j = 0; j < n; ++j) {
      flat.row(j * q + u) = orbit[static_cast<std::size_t>(u)].row(j);
      weighted_f[j * q + u] = g.weight(u) * f.values(j, u);
    }

  GammaFunction out;
  out.values.resize(n, q);
  parallel_for(n, [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i)
      for (Index t = 0; t < q; ++t) {
        const Vector kernel = (flat.rowwise() - flat.row(i * q + t))
                                  .rowwise()
                                  .squaredNorm()
                                  .unaryExpr([&](Real v) { return std::exp(-v / params.epsilon); });
        out.values(i, t) = kernel.cast<Complex>().dot(weighted_f);
      }
  });
  return out;
}

GammaFunction apply_laplacian(const GammaFunction& f, const Dataset& dataset,
                              const AffinityParams& params) {
  GammaFunction wf = apply_w(f, dataset, params);
  const Vector deg = degree(dataset, params);
  GammaFunction out;
  out.values = deg.cast<Complex>().asDiagonal() * f.values - wf.values;
  return out;
}

GammaFunction apply_normalized_laplacian(const GammaFunction& f, const Dataset& dataset,
                                         const AffinityParams& params) {
  GammaFunction wf = apply_w(f, dataset, params);
  const Vector deg = degree(dataset, params);
  GammaFunction out;
  out.values = f.values - deg.cwiseInverse().cast<Complex>().asDiagonal() * wf.values;
  return out;
}

Complex gamma_inner_product(const GammaFunction& g, const GammaFunction& f,
                            const GroupModel& group) {
  if (g.values.rows() != f.values.rows() || g.values.cols() != f.values.cols() ||
      g.n_nodes() != group.quadrature_size())
    throw ConfigError("sampled functions live on different quadratures");
  Complex acc(0.0, 0.0);
  for (Index t = 0; t < g.n_nodes(); ++t)
    acc += group.weight(t) * g.values.col(t).dot(f.values.col(t));
  return acc;  // Eigen's dot conjugates the left factor
}

Real gamma_norm(const GammaFunction& f, const GroupModel& group) {
  return std::sqrt(std::abs(gamma_inner_product(f, f, group).real()));
}

std::pair<Real, Real> estimate_fg(Index i, const GroupElement& kappa,
                                  const Eigen::Ref<const Vector>& x,
                                  const std::function<Real(const Eigen::Ref<const Vector>&)>& f_ambient,
                                  const Dataset& dataset, const AffinityParams& params) {
  params.validate();
  const GroupModel& g = dataset.group;
  const Vector anchor = g.act(kappa, dataset.points.row(i).transpose());
  Real f_acc = 0.0, g_acc = 0.0;
  for (Index u = 0; u < g.quadrature_size(); ++u) {
    const Vector moved = g.act(g.node(u), x);
    const Real k = g.weight(u) * std::exp(-(anchor - moved).squaredNorm() / params.epsilon);
    f_acc += k * f_ambient(moved);
    g_acc += k;
  }
  return {f_acc, g_acc};
}

}  // namespace kinvlap
