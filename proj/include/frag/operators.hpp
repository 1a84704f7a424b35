#pragma once

#include <memory>

#include <Eigen/Dense>

#include "frag/grid.hpp"
#include "frag/kernels.hpp"

namespace frag {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Paired discrete/continuous state. `discrete(k)` is the concentration of
/// (k+1)-mers; `continuous(i)` the cell-averaged density on cell i.
struct SystemState {
  Vector discrete;
  Vector continuous;
  double time = 0.0;
};

/// Semi-discrete realization of the loss, gain, coupling and discrete
/// fragmentation operators on a sectional grid.
///
/// The continuous block evolves as du_C = -diag(loss) u_C + gain u_C, the
/// discrete block as du_D = discrete u_D + coupling u_C. `gain` is upper
/// triangular: cell j only feeds cells i <= j.
struct SemiDiscreteOperators {
  std::shared_ptr<const FragmentationModel> model;
  Grid grid;
  Vector loss;              // a(x_i)
  Matrix gain;              // M x M
  Matrix coupling;          // N x M
  Matrix discrete;          // N x N, upper triangular
  Vector mass_weights;      // x_i w_i
  Vector column_scale;      // rescaling factor applied to column j (1 if none)
  bool rescaled = false;

  std::size_t cutoff() const { return static_cast<std::size_t>(discrete.rows()); }
  std::size_t cells() const { return grid.cells(); }
};

/// Builds all operator blocks. Gain entries integrate b(.|x_j) over each
/// cell by adaptive quadrature (the source cell only up to its center);
/// coupling entries use the midpoint value b_k(x_j) w_j. With `rescale`,
/// column j of (gain, coupling) is scaled jointly so the discrete mass
/// balance holds exactly. Throws DomainError when a column with a(x_j) > 0
/// carries no daughter mass and cannot be rescaled.
SemiDiscreteOperators assemble(std::shared_ptr<const FragmentationModel> model,
                               const Grid& grid, bool rescale = true,
                               double quad_tol = 1e-10);

/// The discrete block E: e_ij = a_j b_{i,j} above the diagonal, -a_i on it.
Matrix discrete_matrix(const FragmentationModel& model);

/// Right-hand side into preallocated outputs.
void apply_rhs(const SemiDiscreteOperators& ops,
               const Eigen::Ref<const Vector>& discrete,
               const Eigen::Ref<const Vector>& continuous,
               Eigen::Ref<Vector> d_discrete, Eigen::Ref<Vector> d_continuous);

/// Time derivative of `state` (its `time` is copied through).
SystemState apply_rhs(const SemiDiscreteOperators& ops, const SystemState& state);

/// sum_j j |v_j| with j starting at 1.
double norm_XD(const Eigen::Ref<const Vector>& v);

/// sum_i x_i w_i |v_i| on the operators' grid.
double norm_XC(const SemiDiscreteOperators& ops, const Eigen::Ref<const Vector>& v);

/// Mass-loss functional c(f) = int (x - int_N^x y b(y|x) dy) a(x) f(x) dx
/// evaluated on cell averages. For a balanced model it equals the mass flux
/// into the discrete regime; any excess is mass that disappears.
double honesty_functional(const SemiDiscreteOperators& ops,
                          const Eigen::Ref<const Vector>& continuous,
                          double quad_tol = 1e-10);

/// Solves (lambda I - E) v = w by back substitution from v_N upward.
Vector resolvent_discrete(const SemiDiscreteOperators& ops, double lambda,
                          const Eigen::Ref<const Vector>& w);
Vector resolvent_discrete(const Matrix& discrete, double lambda,
                          const Eigen::Ref<const Vector>& w);

}  // namespace frag
