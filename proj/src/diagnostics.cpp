#include "frag/diagnostics.hpp"

#include "frag/errors.hpp"

namespace frag {

MassBreakdown masses(const SemiDiscreteOperators& ops, const SystemState& state) {
  MassBreakdown out;
  out.t = state.time;
  for (Eigen::Index k = 0; k < state.discrete.size(); ++k) {
    out.discrete += static_cast<double>(k + 1) * state.discrete(k);
  }
  out.continuous = ops.mass_weights.dot(state.continuous);
  out.total = out.continuous + out.discrete;
  out.monomer = state.discrete.size() > 0 ? state.discrete(0) : 0.0;
  return out;
}

std::optional<double> time_to_fraction(const std::vector<MassBreakdown>& series,
                                       MassComponent which, double fraction) {
  if (series.empty()) throw DomainError("time_to_fraction: empty series");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("time_to_fraction: fraction must lie in (0, 1)");
  }
  const double threshold = fraction * series.front().total;
  auto value = [which](const MassBreakdown& b) {
    return which == MassComponent::discrete ? b.discrete : b.monomer;
  };
  if (value(series.front()) >= threshold) return series.front().t;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double hi = value(series[k]);
    if (hi < threshold) continue;
    const double lo = value(series[k - 1]);
    const double t0 = series[k - 1].t;
    const double t1 = series[k].t;
    return t0 + (t1 - t0) * (threshold - lo) / (hi - lo);
  }
  return std::nullopt;
}

double equilibrium_residual(const SemiDiscreteOperators& ops, const SystemState& state) {
  const SystemState rate = apply_rhs(ops, state);
  return norm_XD(rate.discrete) + norm_XC(ops, rate.continuous);
}

}  // namespace frag
