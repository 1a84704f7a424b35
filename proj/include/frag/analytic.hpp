#pragma once

#include <vector>

#include <Eigen/Dense>

#include "frag/kernels.hpp"

// Closed-form solutions of the power-law model. Deliberately independent of
// the sectional operators: the only shared type is PowerLawParams.
namespace frag::analytic {

/// Confluent hypergeometric 1F1(a; b; z) to relative tolerance `tol`.
///
/// Nonpositive-integer `a` sums the terminating polynomial exactly. For
/// z < 0 otherwise, Kummer's transformation e^z 1F1(b - a; b; -z) avoids
/// cancellation. Throws DomainError when b is a nonpositive integer and
/// RuntimeFailure when the series has not converged after 1e5 terms.
double kummer_1f1(double a, double b, double z, double tol = 1e-15);

/// The raw power series with no transformation; exposed for consistency
/// checks.
double kummer_series(double a, double b, double z, double tol = 1e-15);

/// One piece (lo, hi) -> value of a piecewise-constant initial density.
struct Segment {
  double lo;
  double hi;
  double value;
};

/// Piecewise-constant initial density; open intervals, zero elsewhere.
double evaluate(const std::vector<Segment>& segments, double x);

/// Exact continuous-regime solution for a power-law model with alpha != 0.
class ExactContinuousSolution {
 public:
  /// Throws DomainError for alpha == 0 or a segment reaching below N.
  ExactContinuousSolution(PowerLawParams params, std::vector<Segment> initial);

  const PowerLawParams& params() const { return params_; }
  const std::vector<Segment>& initial() const { return initial_; }
  double m() const { return m_; }

  /// Upper end of the support of the solution for all t.
  double support_end() const;

  /// Sorted points where the solution may have kinks or jumps in x.
  std::vector<double> breakpoints() const;

 private:
  PowerLawParams params_;
  std::vector<Segment> initial_;
  double m_;
};

/// u_C(x, t) = e^{-x^a t} { c0(x) + m a t x^nu int_x^inf y^{a-nu-1} c0(y)
///             1F1(1 - m; 2; t (x^a - y^a)) dy }, the integral by adaptive
/// quadrature. Requires x > N, t >= 0.
double exact_u_C(const ExactContinuousSolution& sol, double x, double t,
                 double quad_tol = 1e-12);

/// Upper-triangular matrix exponential e^{E t} by scaling and squaring with
/// the [13/13] Pade approximant; the diagonal is set to e^{e_ii t} exactly.
Eigen::MatrixXd expm_upper_triangular(const Eigen::MatrixXd& e, double t);

/// The power-law discrete matrix: 2 j^a / (j - 1) above the diagonal and
/// -i^a on it (zero for i = 1).
Eigen::MatrixXd power_law_discrete_matrix(const PowerLawParams& params);

/// beta_i = (i^{nu+2} - (i-1)^{nu+2}) / i.
Eigen::VectorXd transfer_weights(const PowerLawParams& params);

/// Flux integral int_N^inf y^{a-nu-1} u_C(y, s) dy driving the discrete
/// regime.
double transfer_flux(const ExactContinuousSolution& sol, double s,
                     double quad_tol = 1e-12);

/// u_D(t) = e^{Et} d0 + int_0^t e^{(t-s)E} beta flux(s) ds. The s-integral
/// uses composite Gauss-Legendre panels, doubled until successive
/// estimates agree to quad_tol in the mass norm.
Eigen::VectorXd exact_u_D(const ExactContinuousSolution& sol,
                          const Eigen::VectorXd& d0, double t,
                          double quad_tol = 1e-10);

/// int x u_C(x, t) dx by adaptive quadrature.
double exact_continuous_mass(const ExactContinuousSolution& sol, double t,
                             double quad_tol = 1e-10);

}  // namespace frag::analytic
