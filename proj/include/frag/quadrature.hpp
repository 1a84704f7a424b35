#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace frag::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

namespace detail {

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// 15-point Kronrod estimate with the embedded 7-point Gauss rule as error
// indicator.
template <class F>
Panel gk15(F& f, double lo, double hi) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& nodes = Kronrod::abscissa();
  const auto& kw = Kronrod::weights();
  const auto& gw = Gauss::weights();

  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(mid);
  double kronrod = kw[0] * fc;
  double gauss = gw[0] * fc;
  double magnitude = kw[0] * std::abs(fc);
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double dx = half * nodes[k];
    const double fl = f(mid - dx);
    const double fr = f(mid + dx);
    kronrod += kw[k] * (fl + fr);
    magnitude += kw[k] * (std::abs(fl) + std::abs(fr));
    if (k % 2 == 0) gauss += gw[k / 2] * (fl + fr);
  }
  double error = std::abs((kronrod - gauss) * half);
  // Differences at the rounding level of the panel carry no information.
  if (error <= 50.0 * std::numeric_limits<double>::epsilon() * magnitude *
                   std::abs(half)) {
    error = 0.0;
  }
  return {lo, hi, kronrod * half, error};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [lo, hi] to
/// an absolute tolerance. The panel with the largest error estimate is
/// bisected until the summed estimate drops below abs_tol or max_panels is
/// reached (converged = false).
template <class F>
Result integrate(F&& f, double lo, double hi, double abs_tol,
                 std::size_t max_panels = 4000) {
  Result out;
  if (!(hi > lo)) return out;

  std::priority_queue<detail::Panel> heap;
  heap.push(detail::gk15(f, lo, hi));
  out.evaluations = 15;
  double value = heap.top().value;
  double error = heap.top().error;

  // Floor on the error target: panels narrower than this cannot be split
  // meaningfully in double precision.
  const double min_width = 64.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(lo), std::abs(hi));

  while (error > abs_tol && heap.size() < max_panels) {
    const detail::Panel worst = heap.top();
    if (worst.hi - worst.lo <= min_width) break;
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const detail::Panel left = detail::gk15(f, worst.lo, mid);
    const detail::Panel right = detail::gk15(f, mid, worst.hi);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the accumulated rounding of the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = error <= abs_tol;
  return out;
}

/// Composite 10-point Gauss-Legendre rule with `panels` equal panels.
/// f may return any type supporting `+=` and scalar `*`.
template <class F, class T>
T gauss_legendre_panels(F&& f, double lo, double hi, std::size_t panels,
                        T zero) {
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& nodes = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  T sum = zero;
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double dx = half * nodes[k];
      if (nodes[k] == 0.0) {
        sum += (weights[k] * half) * f(mid);
      } else {
        sum += (weights[k] * half) * f(mid - dx);
        sum += (weights[k] * half) * f(mid + dx);
      }
    }
  }
  return sum;
}

}  // namespace frag::quad
