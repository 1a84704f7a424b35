#include "frag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "frag/errors.hpp"
#include "frag/quadrature.hpp"

namespace frag {

FragmentationModel::FragmentationModel(Ingredients ingredients,
                                       std::optional<PowerLawParams> power_law)
    : in_(std::move(ingredients)), power_law_(power_law) {
  if (in_.cutoff < 1) throw DomainError("cutoff N must be at least 1");
  if (!in_.rate || !in_.daughter || !in_.transfer || !in_.discrete_daughter) {
    throw DomainError("fragmentation model is missing a kernel function");
  }
  if (in_.discrete_rates.size() != static_cast<std::size_t>(in_.cutoff)) {
    throw DomainError("expected " + std::to_string(in_.cutoff) +
                      " discrete rates, got " +
                      std::to_string(in_.discrete_rates.size()));
  }
  if (in_.discrete_rates.front() != 0.0) {
    throw DomainError("monomers cannot fragment: a_1 must be 0");
  }
  for (double a : in_.discrete_rates) {
    if (!(a >= 0.0)) throw DomainError("discrete rates must be nonnegative");
  }
}

FragmentationModel make_power_law(double alpha, double nu, int cutoff) {
  if (!(nu > -2.0 && nu <= 0.0)) {
    throw DomainError("power-law exponent nu must lie in (-2, 0], got " +
                      std::to_string(nu));
  }
  if (cutoff < 1) throw DomainError("cutoff N must be at least 1");

  FragmentationModel::Ingredients in;
  in.cutoff = cutoff;
  in.rate = [alpha](double x) { return std::pow(x, alpha); };
  in.daughter = [nu](double x, double y) {
    return (nu + 2.0) * std::pow(x, nu) / std::pow(y, nu + 1.0);
  };
  in.transfer = [nu](int i, double y) {
    const double di = i;
    return (std::pow(di, nu + 2.0) - std::pow(di - 1.0, nu + 2.0)) /
           (di * std::pow(y, nu + 1.0));
  };
  in.discrete_rates.assign(static_cast<std::size_t>(cutoff), 0.0);
  for (int i = 2; i <= cutoff; ++i) {
    in.discrete_rates[static_cast<std::size_t>(i - 1)] =
        std::pow(static_cast<double>(i), alpha);
  }
  in.discrete_daughter = [](int, int j) { return 2.0 / (j - 1.0); };
  return FragmentationModel(std::move(in), PowerLawParams{alpha, nu, cutoff});
}

FragmentationModel without_transfer(const FragmentationModel& model) {
  auto in = model.ingredients();
  in.transfer = [](int, double) { return 0.0; };
  return FragmentationModel(std::move(in), model.power_law());
}

std::vector<BalanceSample> validate_continuous_balance(
    const FragmentationModel& model, const std::vector<double>& y_samples,
    double quad_tol) {
  if (!(quad_tol > 0.0)) throw DomainError("quad_tol must be positive");
  const int n = model.cutoff();
  std::vector<BalanceSample> out;
  out.reserve(y_samples.size());
  for (double y : y_samples) {
    if (!(y > n)) {
      throw DomainError("balance samples must satisfy y > N, got " +
                        std::to_string(y));
    }
    const auto integral = quad::integrate(
        [&](double x) { return x * model.daughter(x, y); },
        static_cast<double>(n), y, quad_tol);
    double discrete = 0.0;
    for (int j = 1; j <= n; ++j) discrete += j * model.transfer(j, y);
    out.push_back({y, std::abs(integral.value + discrete - y) / y,
                   integral.converged});
  }
  return out;
}

std::vector<double> validate_discrete_balance(const FragmentationModel& model) {
  std::vector<double> out;
  for (int i = 2; i <= model.cutoff(); ++i) {
    double sum = 0.0;
    for (int j = 1; j < i; ++j) sum += j * model.discrete_daughter(j, i);
    out.push_back(std::abs(sum - i));
  }
  return out;
}

HonestyReport check_honesty_hypothesis(const FragmentationModel& model,
                                       double x_max, int n_samples) {
  const double n = model.cutoff();
  if (!(x_max > n)) throw DomainError("x_max must exceed the cutoff N");
  if (n_samples < 2) throw DomainError("n_samples must be at least 2");

  HonestyReport report;
  const double span = x_max - n;
  for (int k = 0; k < n_samples; ++k) {
    const double a = model.rate(n + span * std::ldexp(1.0, -k));
    if (!std::isfinite(a)) {
      report.finite = false;
      continue;
    }
    report.sup_near_cutoff = std::max(report.sup_near_cutoff, a);
  }
  for (int k = 1; k <= n_samples; ++k) {
    const double a = model.rate(n + span * k / n_samples);
    if (!std::isfinite(a)) {
      report.finite = false;
      continue;
    }
    report.sup_local = std::max(report.sup_local, a);
  }
  return report;
}

double max_balance_residual(const FragmentationModel& model, double y_max,
                            double quad_tol) {
  const double n = model.cutoff();
  std::vector<double> ys;
  constexpr int kSamples = 50;
  for (int k = 1; k <= kSamples; ++k) ys.push_back(n + (y_max - n) * k / kSamples);
  double worst = 0.0;
  for (const auto& s : validate_continuous_balance(model, ys, quad_tol)) {
    if (!s.converged) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, s.residual);
  }
  for (double r : validate_discrete_balance(model)) worst = std::max(worst, r);
  return worst;
}

}  // namespace frag
