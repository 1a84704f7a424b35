#pragma once

#include <optional>
#include <vector>

#include "frag/operators.hpp"

namespace frag {

struct MassBreakdown {
  double t = 0.0;
  double total = 0.0;
  double continuous = 0.0;
  double discrete = 0.0;
  double monomer = 0.0;
};

/// Signed mass sums (no absolute values, so undershoots show up):
/// M_D = sum i u_D,i, M_C = sum x_i w_i u_C,i, M = M_C + M_D, monomer = u_D,1.
MassBreakdown masses(const SemiDiscreteOperators& ops, const SystemState& state);

enum class MassComponent { discrete, monomer };

/// First time the component reaches fraction * M_total of the first entry,
/// interpolating linearly between samples. Throws DomainError on an empty
/// series or fraction outside (0, 1).
std::optional<double> time_to_fraction(const std::vector<MassBreakdown>& series,
                                       MassComponent which, double fraction);

/// norm_XD(du_D) + norm_XC(du_C): mass-weighted rate of change.
double equilibrium_residual(const SemiDiscreteOperators& ops, const SystemState& state);

/// Default equilibrium threshold per unit time, relative to the initial mass.
inline constexpr double kEquilibriumThreshold = 1e-8;

}  // namespace frag
