#include "frag/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frag {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
// PI exponents (Hairer & Wanner's DOPRI5 defaults).
constexpr double kAlpha = 0.17;
constexpr double kBeta = 0.04;

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
    throw DomainError("integrator tolerances must be positive");
  }
  if (!(cfg.max_dt > 0.0)) throw DomainError("max_dt must be positive");
  for (std::size_t k = 0; k < cfg.output_times.size(); ++k) {
    if (!(cfg.output_times[k] >= 0.0) || !std::isfinite(cfg.output_times[k])) {
      throw DomainError("output times must be finite and nonnegative");
    }
    if (k > 0 && !(cfg.output_times[k] > cfg.output_times[k - 1])) {
      throw DomainError("output times must be strictly increasing");
    }
  }
}

double weighted_norm(const Vector& weights, const Vector& v) {
  return weights.dot(v.cwiseAbs());
}

StepResult step_dense(const OdeSystem& system, double t, const Vector& y,
                      const Vector& derivative_start, double dt,
                      const IntegratorConfig& cfg) {
  const Vector& k1 = derivative_start;
  const auto n = y.size();
  Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), stage(n);

  stage = y + dt * a21 * k1;
  system.rhs(t + c2 * dt, stage, k2);
  stage = y + dt * (a31 * k1 + a32 * k2);
  system.rhs(t + c3 * dt, stage, k3);
  stage = y + dt * (a41 * k1 + a42 * k2 + a43 * k3);
  system.rhs(t + c4 * dt, stage, k4);
  stage = y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
  system.rhs(t + c5 * dt, stage, k5);
  stage = y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
  system.rhs(t + dt, stage, k6);

  StepResult out;
  out.candidate = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  system.rhs(t + dt, out.candidate, k7);
  out.derivative_end = k7;

  const Vector error = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  out.error_estimate = weighted_norm(system.weights, error);
  const double scale =
      cfg.abs_tol + cfg.rel_tol * std::max(weighted_norm(system.weights, y),
                                           weighted_norm(system.weights, out.candidate));
  out.error_ratio = out.error_estimate / scale;
  out.accepted = out.error_ratio <= 1.0 && all_finite(out.candidate);
  return out;
}

Trajectory integrate_system(const OdeSystem& system, double t0, const Vector& y0,
                            const IntegratorConfig& cfg) {
  validate(cfg);
  Trajectory traj;
  if (cfg.output_times.empty()) return traj;
  if (t0 > cfg.output_times.front()) {
    throw DomainError("initial time lies after the first output time");
  }
  if (!all_finite(y0)) throw DomainError("initial state is not finite");

  const double t_final = cfg.output_times.back();
  const double min_dt = 1e-14 * std::max(t_final, 1e-300);

  double t = t0;
  Vector y = y0;
  Vector dy(y.size());
  system.rhs(t, y, dy);

  double dt = cfg.initial_dt;
  if (!(dt > 0.0)) {
    // Start so that a first-order step changes the state by ~1e-3 of its size.
    const double size = weighted_norm(system.weights, y);
    const double rate = weighted_norm(system.weights, dy);
    dt = (size > 0.0 && rate > 0.0) ? 1e-3 * size / rate : 1e-3;
    dt = std::max(dt, 1e-6 * std::max(t_final - t0, 1.0));
  }
  dt = std::min(dt, cfg.max_dt);

  double previous_ratio = 1e-4;
  std::size_t next = 0;
  auto record_due = [&] {
    while (next < cfg.output_times.size() && cfg.output_times[next] == t) {
      traj.times.push_back(t);
      traj.states.push_back(y);
      ++next;
    }
  };
  record_due();

  while (next < cfg.output_times.size()) {
    const double target = cfg.output_times[next];
    double h = std::min(dt, cfg.max_dt);
    bool lands = false;
    if (t + h >= target || target - (t + h) < min_dt) {
      h = target - t;
      lands = true;
    }
    if (h < min_dt && !lands) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t << " (dt = " << h << ")";
      throw IntegrationFailure(msg.str(), std::move(traj));
    }

    StepResult step = step_dense(system, t, y, dy, h, cfg);
    if (!all_finite(step.candidate) || !std::isfinite(step.error_ratio)) {
      if (!all_finite(y)) {
        throw IntegrationFailure("non-finite state", std::move(traj));
      }
      dt = h * kMinFactor;
      ++traj.rejected_steps;
      if (dt < min_dt) {
        std::ostringstream msg;
        msg << "non-finite state near t = " << t;
        throw IntegrationFailure(msg.str(), std::move(traj));
      }
      continue;
    }

    const double ratio = std::max(step.error_ratio, 1e-16);
    if (step.accepted) {
      double factor = std::pow(ratio, kAlpha) / (std::pow(previous_ratio, kBeta) * kSafety);
      factor = std::clamp(1.0 / factor, kMinFactor, kMaxFactor);
      previous_ratio = std::max(ratio, 1e-4);
      t = lands ? target : t + h;
      y = std::move(step.candidate);
      dy = std::move(step.derivative_end);
      ++traj.accepted_steps;
      // A step shortened to land on an output does not shrink the next one.
      dt = lands ? std::max(dt, h * factor) : h * factor;
      record_due();
    } else {
      const double factor =
          std::max(kMinFactor, kSafety * std::pow(ratio, -1.0 / 5.0));
      dt = h * factor;
      ++traj.rejected_steps;
      if (dt < min_dt) {
        std::ostringstream msg;
        msg << "step size underflow at t = " << t << " (dt = " << dt << ")";
        throw IntegrationFailure(msg.str(), std::move(traj));
      }
    }
  }
  return traj;
}

Vector pack(const SystemState& state) {
  Vector flat(state.discrete.size() + state.continuous.size());
  flat << state.discrete, state.continuous;
  return flat;
}

SystemState unpack(const Vector& flat, std::size_t cutoff, double time) {
  const auto n = static_cast<Eigen::Index>(cutoff);
  SystemState s;
  s.discrete = flat.head(n);
  s.continuous = flat.tail(flat.size() - n);
  s.time = time;
  return s;
}

std::vector<SystemState> integrate(const SemiDiscreteOperators& ops,
                                   const SystemState& initial,
                                   const IntegratorConfig& cfg,
                                   IntegrationStats* stats) {
  const auto n = static_cast<Eigen::Index>(ops.cutoff());
  const auto m = static_cast<Eigen::Index>(ops.cells());
  if (initial.discrete.size() != n || initial.continuous.size() != m) {
    throw DomainError("state dimensions do not match the operators");
  }

  OdeSystem system;
  system.weights.resize(n + m);
  for (Eigen::Index k = 0; k < n; ++k) system.weights(k) = static_cast<double>(k + 1);
  system.weights.tail(m) = ops.mass_weights;
  system.rhs = [&ops, n, m](double, const Vector& y, Vector& dy) {
    apply_rhs(ops, y.head(n), y.tail(m), dy.head(n), dy.tail(m));
  };

  auto to_states = [&](const Trajectory& traj) {
    std::vector<SystemState> out;
    out.reserve(traj.states.size());
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      out.push_back(unpack(traj.states[k], ops.cutoff(), traj.times[k]));
    }
    return out;
  };

  const Trajectory traj = integrate_system(system, initial.time, pack(initial), cfg);
  if (stats) {
    stats->accepted_steps = traj.accepted_steps;
    stats->rejected_steps = traj.rejected_steps;
  }
  return to_states(traj);
}

}  // namespace frag
