#include "frag/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "frag/errors.hpp"
#include "frag/quadrature.hpp"

namespace frag::analytic {

namespace {

constexpr int kSeriesCap = 100000;

bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

double terminating_series(double a, double b, double z) {
  // a = -n: sum_{k=0}^{n} (a)_k z^k / ((b)_k k!)
  const int n = static_cast<int>(-a);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < n; ++k) {
    term *= (a + k) * z / ((b + k) * (k + 1));
    sum += term;
  }
  return sum;
}

double integrate_or_throw(const auto& f, double lo, double hi, double tol,
                          const char* what) {
  const auto r = quad::integrate(f, lo, hi, tol);
  if (!r.converged) {
    std::ostringstream msg;
    msg << what << ": quadrature on (" << lo << ", " << hi
        << ") did not converge (error estimate " << r.error << ")";
    throw RuntimeFailure(msg.str());
  }
  return r.value;
}

}  // namespace

double kummer_series(double a, double b, double z, double tol) {
  if (is_nonpositive_integer(b)) {
    throw DomainError("1F1 undefined for nonpositive integer b = " + std::to_string(b));
  }
  if (is_nonpositive_integer(a)) return terminating_series(a, b, z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < kSeriesCap; ++k) {
    term *= (a + k) * z / ((b + k) * (k + 1));
    sum += term;
    if (term == 0.0) return sum;
    const double next_ratio = std::abs((a + k + 1) * z / ((b + k + 1) * (k + 2)));
    // Past the peak the tail is bounded by a geometric series.
    if (next_ratio < 0.5 && std::abs(term) <= tol * std::abs(sum)) return sum;
  }
  std::ostringstream msg;
  msg << "1F1(" << a << "; " << b << "; " << z << ") series did not converge in "
      << kSeriesCap << " terms (partial sum " << sum << ", last term " << term << ")";
  throw RuntimeFailure(msg.str());
}

double kummer_1f1(double a, double b, double z, double tol) {
  if (is_nonpositive_integer(b)) {
    throw DomainError("1F1 undefined for nonpositive integer b = " + std::to_string(b));
  }
  if (z == 0.0) return 1.0;
  if (is_nonpositive_integer(a)) return terminating_series(a, b, z);
  if (z < 0.0) return std::exp(z) * kummer_series(b - a, b, -z, tol);
  return kummer_series(a, b, z, tol);
}

double evaluate(const std::vector<Segment>& segments, double x) {
  double v = 0.0;
  for (const auto& s : segments) {
    if (x > s.lo && x < s.hi) v += s.value;
  }
  return v;
}

ExactContinuousSolution::ExactContinuousSolution(PowerLawParams params,
                                                 std::vector<Segment> initial)
    : params_(params), initial_(std::move(initial)) {
  if (params_.alpha == 0.0) {
    throw DomainError("analytic solution unavailable for alpha = 0");
  }
  for (const auto& s : initial_) {
    if (!(s.lo >= params_.cutoff) || !(s.hi > s.lo)) {
      throw DomainError("initial segments must lie in (N, inf) with lo < hi");
    }
  }
  m_ = (2.0 + params_.nu) / params_.alpha;
}

double ExactContinuousSolution::support_end() const {
  double end = params_.cutoff;
  for (const auto& s : initial_) {
    if (s.value != 0.0) end = std::max(end, s.hi);
  }
  return end;
}

std::vector<double> ExactContinuousSolution::breakpoints() const {
  std::vector<double> pts{static_cast<double>(params_.cutoff)};
  for (const auto& s : initial_) {
    pts.push_back(s.lo);
    pts.push_back(s.hi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double end = support_end();
  std::erase_if(pts, [&](double p) { return p > end; });
  return pts;
}

double exact_u_C(const ExactContinuousSolution& sol, double x, double t,
                 double quad_tol) {
  const auto& p = sol.params();
  if (!(x > p.cutoff)) throw DomainError("exact_u_C requires x > N");
  if (!(t >= 0.0)) throw DomainError("exact_u_C requires t >= 0");

  const double xa = std::pow(x, p.alpha);
  const double c0 = evaluate(sol.initial(), x);
  if (t == 0.0) return c0;

  const double kummer_a = 1.0 - sol.m();
  const double exponent = p.alpha - p.nu - 1.0;
  double integral = 0.0;
  for (const auto& seg : sol.initial()) {
    const double lo = std::max(x, seg.lo);
    if (seg.value == 0.0 || !(seg.hi > lo)) continue;
    integral += seg.value * integrate_or_throw(
                                [&](double y) {
                                  return std::pow(y, exponent) *
                                         kummer_1f1(kummer_a, 2.0,
                                                    t * (xa - std::pow(y, p.alpha)));
                                },
                                lo, seg.hi, quad_tol, "exact_u_C");
  }
  return std::exp(-xa * t) *
         (c0 + sol.m() * p.alpha * t * std::pow(x, p.nu) * integral);
}

Eigen::MatrixXd expm_upper_triangular(const Eigen::MatrixXd& e, double t) {
  using Eigen::MatrixXd;
  const Eigen::Index n = e.rows();
  if (e.cols() != n) throw DomainError("expm requires a square matrix");
  if (n == 0) return MatrixXd(0, 0);

  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  MatrixXd a = e.triangularView<Eigen::Upper>();
  a *= t;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    a /= std::ldexp(1.0, squarings);
  }

  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * id);
  const MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                     b[4] * a4 + b[2] * a2 + b[0] * id;
  const MatrixXd denom = v - u;
  MatrixXd r = denom.triangularView<Eigen::Upper>().solve(v + u);
  for (int k = 0; k < squarings; ++k) {
    r = (r.triangularView<Eigen::Upper>() * r).eval();
  }
  r.triangularView<Eigen::StrictlyLower>().setZero();
  for (Eigen::Index i = 0; i < n; ++i) r(i, i) = std::exp(e(i, i) * t);
  return r;
}

Eigen::MatrixXd power_law_discrete_matrix(const PowerLawParams& params) {
  const int n = params.cutoff;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  for (int j = 2; j <= n; ++j) {
    const double aj = std::pow(static_cast<double>(j), params.alpha);
    e(j - 1, j - 1) = -aj;
    for (int i = 1; i < j; ++i) e(i - 1, j - 1) = 2.0 * aj / (j - 1.0);
  }
  return e;
}

Eigen::VectorXd transfer_weights(const PowerLawParams& params) {
  Eigen::VectorXd beta(params.cutoff);
  for (int i = 1; i <= params.cutoff; ++i) {
    const double di = i;
    beta(i - 1) = (std::pow(di, params.nu + 2.0) - std::pow(di - 1.0, params.nu + 2.0)) / di;
  }
  return beta;
}

double transfer_flux(const ExactContinuousSolution& sol, double s, double quad_tol) {
  const auto& p = sol.params();
  const double exponent = p.alpha - p.nu - 1.0;
  const auto pts = sol.breakpoints();
  double flux = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    flux += integrate_or_throw(
        [&](double y) { return std::pow(y, exponent) * exact_u_C(sol, y, s, 0.1 * quad_tol); },
        pts[k], pts[k + 1], quad_tol, "transfer_flux");
  }
  return flux;
}

Eigen::VectorXd exact_u_D(const ExactContinuousSolution& sol,
                          const Eigen::VectorXd& d0, double t, double quad_tol) {
  const auto& p = sol.params();
  if (d0.size() != p.cutoff) throw DomainError("d0 must have length N");
  if (!(t >= 0.0)) throw DomainError("exact_u_D requires t >= 0");
  if (t == 0.0) return d0;

  const Eigen::MatrixXd e = power_law_discrete_matrix(p);
  const Eigen::VectorXd beta = transfer_weights(p);
  const Eigen::VectorXd homogeneous = expm_upper_triangular(e, t) * d0;
  if (sol.support_end() <= p.cutoff) return homogeneous;

  auto forcing = [&](double s) -> Eigen::VectorXd {
    return expm_upper_triangular(e, t - s) * beta * transfer_flux(sol, s, 0.1 * quad_tol);
  };
  auto mass_norm = [](const Eigen::VectorXd& v) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) sum += (k + 1.0) * std::abs(v(k));
    return sum;
  };

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.cutoff);
  std::size_t panels = 2;
  Eigen::VectorXd previous = quad::gauss_legendre_panels(forcing, 0.0, t, panels, zero);
  constexpr std::size_t kMaxPanels = 1024;
  while (true) {
    panels *= 2;
    Eigen::VectorXd current = quad::gauss_legendre_panels(forcing, 0.0, t, panels, zero);
    const double change = mass_norm(current - previous);
    if (change <= quad_tol * std::max(1.0, mass_norm(current))) {
      return homogeneous + current;
    }
    if (panels >= kMaxPanels) {
      std::ostringstream msg;
      msg << "exact_u_D: time quadrature did not converge (last change " << change << ")";
      throw RuntimeFailure(msg.str());
    }
    previous = std::move(current);
  }
}

double exact_continuous_mass(const ExactContinuousSolution& sol, double t,
                             double quad_tol) {
  const auto pts = sol.breakpoints();
  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    mass += integrate_or_throw(
        [&](double x) { return x * exact_u_C(sol, x, t, 0.1 * quad_tol); }, pts[k],
        pts[k + 1], quad_tol, "exact_continuous_mass");
  }
  return mass;
}

}  // namespace frag::analytic
