#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "frag/errors.hpp"
#include "frag/operators.hpp"

namespace frag {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_dt = 0.0;  // <= 0 selects a starting step automatically
  double max_dt = std::numeric_limits<double>::infinity();
  std::vector<double> output_times;
};

/// Throws DomainError unless tolerances are positive and output times are
/// nonnegative and strictly increasing.
void validate(const IntegratorConfig& cfg);

/// Autonomous linear or nonlinear system dy/dt = f(t, y) with a weighted l1
/// norm sum_k weight_k |v_k| used for error control.
struct OdeSystem {
  std::function<void(double, const Vector&, Vector&)> rhs;
  Vector weights;
};

double weighted_norm(const Vector& weights, const Vector& v);

struct StepResult {
  Vector candidate;
  Vector derivative_end;  // f(t + dt, candidate), reusable as the next first stage
  double error_estimate = 0.0;  // weighted norm of the embedded difference
  double error_ratio = 0.0;     // error_estimate / tolerance scale
  bool accepted = false;
};

/// One Dormand-Prince 5(4) step from (t, y) with step dt. `derivative_start`
/// is f(t, y). Acceptance compares the weighted error with
/// abs_tol + rel_tol * max(|y|, |candidate|) in the same norm.
StepResult step_dense(const OdeSystem& system, double t, const Vector& y,
                      const Vector& derivative_start, double dt,
                      const IntegratorConfig& cfg);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Raised on step-size underflow or a non-finite state. Carries every output
/// recorded before the failure.
class IntegrationFailure : public RuntimeFailure {
 public:
  IntegrationFailure(const std::string& what, Trajectory partial)
      : RuntimeFailure(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Integrates from (t0, y0) and records the solution at each requested
/// output time, landing steps exactly on them.
Trajectory integrate_system(const OdeSystem& system, double t0, const Vector& y0,
                            const IntegratorConfig& cfg);

struct IntegrationStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Integrates the semi-discrete fragmentation system; the error norm is the
/// mass norm norm_XD + norm_XC. Throws IntegrationFailure (with partial
/// states) on abort.
std::vector<SystemState> integrate(const SemiDiscreteOperators& ops,
                                   const SystemState& initial,
                                   const IntegratorConfig& cfg,
                                   IntegrationStats* stats = nullptr);

/// Flattened [discrete; continuous] layout used by integrate().
Vector pack(const SystemState& state);
SystemState unpack(const Vector& flat, std::size_t cutoff, double time);

}  // namespace frag
