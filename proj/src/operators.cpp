#include "frag/operators.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "frag/errors.hpp"
#include "frag/parallel.hpp"
#include "frag/quadrature.hpp"

namespace frag {

Matrix discrete_matrix(const FragmentationModel& model) {
  const int n = model.cutoff();
  Matrix e = Matrix::Zero(n, n);
  for (int j = 1; j <= n; ++j) {
    const double aj = model.discrete_rate(j);
    e(j - 1, j - 1) = -aj;
    for (int i = 1; i < j; ++i) e(i - 1, j - 1) = aj * model.discrete_daughter(i, j);
  }
  return e;
}

SemiDiscreteOperators assemble(std::shared_ptr<const FragmentationModel> model,
                               const Grid& grid, bool rescale, double quad_tol) {
  if (!model) throw DomainError("assemble requires a model");
  if (grid.lower() != model->cutoff()) {
    throw DomainError("grid must start at the cutoff N");
  }
  const auto m = static_cast<Eigen::Index>(grid.cells());
  const int n = model->cutoff();
  const auto& x = grid.centers();
  const auto& w = grid.widths();
  const auto& e = grid.edges();

  SemiDiscreteOperators ops;
  ops.model = model;
  ops.grid = grid;
  ops.rescaled = rescale;
  ops.loss.resize(m);
  ops.mass_weights.resize(m);
  ops.column_scale = Vector::Ones(m);
  ops.gain = Matrix::Zero(m, m);
  ops.coupling = Matrix::Zero(n, m);
  ops.discrete = discrete_matrix(*model);

  for (Eigen::Index j = 0; j < m; ++j) {
    ops.loss(j) = model->rate(x[j]);
    ops.mass_weights(j) = x[j] * w[j];
  }

  std::vector<Eigen::Index> failed_columns;
  std::mutex failed_guard;

  // Columns are independent; each worker owns whole columns.
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t col) {
    const auto j = static_cast<Eigen::Index>(col);
    const double y = x[col];
    const double a = ops.loss(j);
    if (a == 0.0) return;
    auto density = [&](double s) { return model->daughter(s, y); };

    for (Eigen::Index i = 0; i <= j; ++i) {
      const double hi = i == j ? y : e[static_cast<std::size_t>(i) + 1];
      const auto r = quad::integrate(density, e[static_cast<std::size_t>(i)], hi,
                                     quad_tol);
      ops.gain(i, j) = a * (w[col] / w[static_cast<std::size_t>(i)]) * r.value;
    }
    for (int k = 1; k <= n; ++k) {
      ops.coupling(k - 1, j) = a * model->transfer(k, y) * w[col];
    }

    if (!rescale) return;
    double column_mass = ops.mass_weights.head(j + 1).dot(ops.gain.col(j).head(j + 1));
    for (int k = 1; k <= n; ++k) column_mass += k * ops.coupling(k - 1, j);
    const double target = a * ops.mass_weights(j);
    if (!(column_mass > 0.0) || !std::isfinite(column_mass)) {
      std::lock_guard lock(failed_guard);
      failed_columns.push_back(j);
      return;
    }
    const double scale = target / column_mass;
    ops.gain.col(j) *= scale;
    ops.coupling.col(j) *= scale;
    ops.column_scale(j) = scale;
  });

  if (!failed_columns.empty()) {
    std::sort(failed_columns.begin(), failed_columns.end());
    throw DomainError("rescaling failed: column " +
                      std::to_string(failed_columns.front()) +
                      " has positive rate but no daughter mass (" +
                      std::to_string(failed_columns.size()) + " columns)");
  }
  return ops;
}

void apply_rhs(const SemiDiscreteOperators& ops,
               const Eigen::Ref<const Vector>& discrete,
               const Eigen::Ref<const Vector>& continuous,
               Eigen::Ref<Vector> d_discrete, Eigen::Ref<Vector> d_continuous) {
  d_continuous.noalias() = ops.gain.triangularView<Eigen::Upper>() * continuous;
  d_continuous -= ops.loss.cwiseProduct(continuous);
  d_discrete.noalias() = ops.discrete.triangularView<Eigen::Upper>() * discrete;
  d_discrete.noalias() += ops.coupling * continuous;
}

SystemState apply_rhs(const SemiDiscreteOperators& ops, const SystemState& state) {
  SystemState out;
  out.time = state.time;
  out.discrete.resize(state.discrete.size());
  out.continuous.resize(state.continuous.size());
  apply_rhs(ops, state.discrete, state.continuous, out.discrete, out.continuous);
  return out;
}

double norm_XD(const Eigen::Ref<const Vector>& v) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    sum += static_cast<double>(j + 1) * std::abs(v(j));
  }
  return sum;
}

double norm_XC(const SemiDiscreteOperators& ops, const Eigen::Ref<const Vector>& v) {
  return ops.mass_weights.dot(v.cwiseAbs());
}

double honesty_functional(const SemiDiscreteOperators& ops,
                          const Eigen::Ref<const Vector>& continuous,
                          double quad_tol) {
  const auto& model = *ops.model;
  const double n = model.cutoff();
  const auto& x = ops.grid.centers();
  const auto& w = ops.grid.widths();
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double f = continuous(static_cast<Eigen::Index>(j));
    if (f == 0.0 || ops.loss(static_cast<Eigen::Index>(j)) == 0.0) continue;
    const double y = x[j];
    const double retained =
        quad::integrate([&](double s) { return s * model.daughter(s, y); }, n, y,
                        quad_tol)
            .value;
    total += (y - retained) * ops.loss(static_cast<Eigen::Index>(j)) * f * w[j];
  }
  return total;
}

Vector resolvent_discrete(const Matrix& discrete, double lambda,
                          const Eigen::Ref<const Vector>& w) {
  if (!(lambda > 0.0)) throw DomainError("resolvent requires lambda > 0");
  const Eigen::Index n = discrete.rows();
  Vector v(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double rhs = w(i);
    for (Eigen::Index j = i + 1; j < n; ++j) rhs += discrete(i, j) * v(j);
    v(i) = rhs / (lambda - discrete(i, i));
  }
  return v;
}

Vector resolvent_discrete(const SemiDiscreteOperators& ops, double lambda,
                          const Eigen::Ref<const Vector>& w) {
  return resolvent_discrete(ops.discrete, lambda, w);
}

}  // namespace frag
