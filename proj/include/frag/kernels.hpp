#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace frag {

/// Exponents of the power-law family: a(x) = x^alpha and
/// b(x|y) = (nu + 2) x^nu / y^(nu + 1), with -2 < nu <= 0.
struct PowerLawParams {
  double alpha = 0.0;
  double nu = 0.0;
  int cutoff = 1;
};

/// The five kernel ingredients of the mixed discrete-continuous model.
///
/// Particles of mass x > cutoff are continuous and break at rate a(x) into
/// continuous daughters with density b(x|y) and into i-mers (i <= cutoff)
/// with expected counts b_i(y). Discrete particles of size j break at rate
/// a_j into i-mers with expected count b_{i,j}.
///
/// Instances are immutable and safe to evaluate concurrently.
class FragmentationModel {
 public:
  struct Ingredients {
    int cutoff = 1;
    std::function<double(double)> rate;                   // a(x), x > N
    std::function<double(double, double)> daughter;       // b(x|y), N < x <= y
    std::function<double(int, double)> transfer;          // b_i(y), i = 1..N
    std::vector<double> discrete_rates;                   // a_1..a_N
    std::function<double(int, int)> discrete_daughter;    // b_{i,j}, i < j
  };

  /// Throws DomainError when cutoff < 1, discrete_rates has the wrong
  /// length, any rate is negative, a_1 != 0, or a callable is missing.
  explicit FragmentationModel(Ingredients ingredients,
                              std::optional<PowerLawParams> power_law = {});

  int cutoff() const { return in_.cutoff; }

  double rate(double x) const { return in_.rate(x); }

  /// b(x|y); zero outside N < x <= y.
  double daughter(double x, double y) const {
    if (x > y || x <= in_.cutoff) return 0.0;
    return in_.daughter(x, y);
  }

  /// b_i(y) for i in 1..N.
  double transfer(int i, double y) const { return in_.transfer(i, y); }

  /// a_i for i in 1..N.
  double discrete_rate(int i) const { return in_.discrete_rates[i - 1]; }

  /// b_{i,j}; zero unless 1 <= i < j <= N.
  double discrete_daughter(int i, int j) const {
    if (i < 1 || i >= j || j > in_.cutoff) return 0.0;
    return in_.discrete_daughter(i, j);
  }

  /// Set when the model was built by make_power_law (possibly modified).
  const std::optional<PowerLawParams>& power_law() const { return power_law_; }

  const Ingredients& ingredients() const { return in_; }

 private:
  Ingredients in_;
  std::optional<PowerLawParams> power_law_;
};

/// Power-law rates and daughter distributions with uniform binary discrete
/// fragmentation b_{i,j} = 2/(j-1) and a_i = i^alpha (a_1 = 0).
/// Throws DomainError unless -2 < nu <= 0 and cutoff >= 1.
FragmentationModel make_power_law(double alpha, double nu, int cutoff);

/// Copy of `model` with b_i(y) = 0 for every i: continuous fragmentation
/// then destroys the mass it would have sent to the discrete regime.
FragmentationModel without_transfer(const FragmentationModel& model);

struct BalanceSample {
  double y = 0.0;
  double residual = 0.0;
  bool converged = true;
};

/// Relative residual |int_N^y x b(x|y) dx + sum_j j b_j(y) - y| / y of the
/// continuous mass balance at each sample. The integral uses adaptive
/// quadrature to absolute tolerance quad_tol; a sample whose quadrature did
/// not converge is flagged rather than thrown.
std::vector<BalanceSample> validate_continuous_balance(
    const FragmentationModel& model, const std::vector<double>& y_samples,
    double quad_tol = 1e-10);

/// |sum_{j<i} j b_{j,i} - i| for i = 2..N (element k holds i = k + 2).
std::vector<double> validate_discrete_balance(const FragmentationModel& model);

struct HonestyReport {
  double sup_near_cutoff = 0.0;
  double sup_local = 0.0;
  bool finite = true;
};

/// Samples a(x) at x_k = N + (x_max - N) 2^-k, k < n_samples, and on a
/// uniform mesh of (N, x_max]. Advisory only: finite suprema are consistent
/// with, but do not prove, boundedness near N and local boundedness.
HonestyReport check_honesty_hypothesis(const FragmentationModel& model,
                                       double x_max, int n_samples);

/// Largest residual across both balance checks on a default sample set of
/// y in (N, y_max]; used as the gate before solving.
double max_balance_residual(const FragmentationModel& model, double y_max,
                            double quad_tol = 1e-10);

/// Residual above which the solver refuses a model without a force flag.
inline constexpr double kBalanceGate = 1e-6;

}  // namespace frag
