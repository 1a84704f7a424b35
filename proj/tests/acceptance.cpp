// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "frag/analytic.hpp"
#include "frag/commands.hpp"
#include "frag/diagnostics.hpp"
#include "frag/kernels.hpp"
#include "frag/operators.hpp"
#include "test_support.hpp"

using namespace frag;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Suite {
 public:
  void run(const std::string& name, double time_limit, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < time_limit;
    const bool pass = out.pass && in_time;
    failures_ += pass ? 0 : 1;
    std::printf("[%s] %s: %s (%.2f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", name.c_str(),
                out.detail.c_str(), secs, time_limit);
    std::fflush(stdout);
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Closed-form initial mass of the uniform IC: sum_{i=1}^5 i + int_5^15 x dx.
constexpr double kInitialMass = 15.0 + (15.0 * 15.0 - 5.0 * 5.0) / 2.0;

// Regression pins from the first oracle-backed runs (1000 cells, tol 1e-10).
constexpr double kCase1TimeTo90 = 46.48007166008534;
constexpr double kCase2TimeTo90 = 1.4918881974489753;

double max_monotonicity_violation(const std::vector<MassBreakdown>& s, double rel_tol) {
  double worst = 0.0;  // violation in units of the allowed budget
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double budget = 10.0 * rel_tol * s.front().total * (1.0 + s[k].t);
    worst = std::max(worst, (s[k].continuous - s[k - 1].continuous) / budget);
    worst = std::max(worst, (s[k - 1].discrete - s[k].discrete) / budget);
    worst = std::max(worst, (s[k - 1].monomer - s[k].monomer) / budget);
  }
  return worst;
}

double min_entry(const Simulation& sim) {
  double m = INFINITY;
  for (const auto& s : sim.states) {
    m = std::min({m, s.discrete.minCoeff(), s.continuous.minCoeff()});
  }
  return m;
}

}  // namespace

int main() {
  Suite suite;

  suite.run("kernel balance", 1.0, [] {
    double worst_c = 0.0, worst_d = 0.0;
    bool converged = true;
    for (auto [alpha, nu] : {std::pair{-1.0, 0.0}, std::pair{0.5, -0.5}}) {
      const auto model = make_power_law(alpha, nu, 5);
      std::vector<double> ys;
      for (int k = 1; k <= 50; ++k) ys.push_back(5.0 + 95.0 * k / 50.0);
      for (const auto& s : validate_continuous_balance(model, ys, 1e-10)) {
        worst_c = std::max(worst_c, s.residual);
        converged = converged && s.converged;
      }
      for (double r : validate_discrete_balance(model)) worst_d = std::max(worst_d, r);
    }
    return Outcome{converged && worst_c < 1e-9 && worst_d < 1e-12,
                   "max continuous residual " + fmt("%.3g", worst_c) + " (< 1e-9), max discrete " +
                       fmt("%.3g", worst_d) + " (< 1e-12)"};
  });

  suite.run("1F1 identities", 1.0, [] {
    double worst = 0.0;
    auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
    for (int k = 0; k <= 200; ++k) {
      const double z = -20.0 + 0.2 * k;
      for (auto [a, b] : {std::pair{0.5, 1.5}, std::pair{-1.3, 2.0}, std::pair{3.0, 0.7}}) {
        worst = std::max(worst, rel(analytic::kummer_1f1(a, b, 0.0), 1.0));
      }
      worst = std::max(worst, rel(analytic::kummer_1f1(1.0, 1.0, z), std::exp(z)));
      if (z != 0.0) {
        worst = std::max(worst, rel(analytic::kummer_1f1(1.0, 2.0, z), std::expm1(z) / z));
      }
      worst = std::max(worst, rel(analytic::kummer_1f1(-2.0, 2.0, z), 1.0 - z + z * z / 6.0));
    }
    return Outcome{worst <= 1e-12, "max relative error " + fmt("%.3g", worst) +
                                       " over 201 points in [-20, 20] (<= 1e-12)"};
  });

  suite.run("solver vs oracle (case 1, t = 4)", 60.0, [] {
    RunConfig cfg = preset("case1");
    cfg.compare.resolutions = {250, 500, 1000, 2000};
    cfg.compare.time = 4.0;
    const CompareReport report = run_compare(cfg);
    bool pass = true;
    std::string detail;
    for (const auto& e : report.entries) {
      detail += std::to_string(e.cells) + ":" + fmt("%.3e", e.error_continuous) + " ";
      if (e.cells == 1000) {
        pass = pass && e.error_continuous <= 1e-2 && e.error_discrete <= 1e-4;
        detail += "[u_D " + fmt("%.3e", e.error_discrete) + "] ";
      }
    }
    detail += "ratios";
    for (double r : report.ratios) {
      detail += " " + fmt("%.3f", r);
      pass = pass && r >= 1.8;
    }
    // The oracle itself against frozen high-precision values.
    const analytic::ExactContinuousSolution sol({-1.0, 0.0, 5}, cfg.initial.continuous);
    const double pinned = 1.0722996737105081698;
    const double oracle_err = std::abs(analytic::exact_u_C(sol, 6.0, 4.0) - pinned) / pinned;
    pass = pass && oracle_err < 1e-10;
    detail += "; oracle u_C(6,4) rel err " + fmt("%.1e", oracle_err);
    return Outcome{pass, detail + " (L1x <= 1e-2 at 1000 cells, ratios >= 1.8, u_D <= 1e-4)"};
  });

  std::printf("running case1 and case2 presets...\n");
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig case1 = preset("case1");
  const Simulation sim1 = simulate(case1);
  const double case1_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto t1 = std::chrono::steady_clock::now();
  const RunConfig case2 = preset("case2");
  const Simulation sim2 = simulate(case2);
  const double case2_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

  suite.run("mass conservation (case 1)", 30.0 - case1_seconds, [&] {
    if (sim1.failure) return Outcome{false, "integration failed: " + *sim1.failure};
    double drift = 0.0;
    for (const auto& b : sim1.series) drift = std::max(drift, std::abs(b.total - kInitialMass) / kInitialMass);
    const double m0_err = std::abs(sim1.series.front().total - kInitialMass) / kInitialMass;
    return Outcome{drift <= 1e-8 && m0_err <= 1e-12,
                   "M(0) = " + fmt("%.15g", sim1.series.front().total) + " vs closed form " +
                       fmt("%.0f", kInitialMass) + "; max |M(t) - M(0)|/M(0) = " +
                       fmt("%.3g", drift) + " over t in [0, 100] (<= 1e-8); case-1 run " +
                       fmt("%.2f s", case1_seconds)};
  });

  suite.run("nonnegativity (case 1, case 2)", 1.0, [&] {
    if (sim1.failure || sim2.failure) return Outcome{false, "integration failed"};
    const double m1 = min_entry(sim1);
    const double m2 = min_entry(sim2);
    return Outcome{m1 >= -1e-8 && m2 >= -1e-8,
                   "min entry case1 " + fmt("%.3g", m1) + ", case2 " + fmt("%.3g", m2) + " (>= -1e-8)"};
  });

  suite.run("operator inequalities", 5.0, [] {
    std::mt19937_64 rng(2024);
    double worst = INFINITY;
    for (auto [alpha, nu] : {std::pair{-1.0, 0.0}, std::pair{0.5, -0.5}}) {
      auto model = std::make_shared<const FragmentationModel>(make_power_law(alpha, nu, 5));
      const auto ops = assemble(model, build_grid(5, 15.0, 200), true);
      for (int trial = 0; trial < 1000; ++trial) {
        const Vector f = test::random_nonnegative(rng, 200);
        const Vector loss = ops.loss.cwiseProduct(f);
        const Vector gain = ops.gain * f;
        const double flux = norm_XD(ops.coupling * f);
        const double scale = std::max(norm_XC(ops, loss), 1e-300);
        worst = std::min({worst, (norm_XC(ops, loss) - norm_XC(ops, gain)) / scale,
                          (norm_XC(ops, loss) - flux) / scale,
                          (norm_XC(ops, loss - gain) - flux) / scale});
      }
    }
    return Outcome{worst >= -1e-12, "min relative slack over (a)-(c) " + fmt("%.3g", worst) +
                                        " (>= -1e-12), 1000 vectors x 2 models"};
  });

  suite.run("resolvent positivity", 1.0, [] {
    std::mt19937_64 rng(99);
    double worst = INFINITY;
    int solves = 0;
    for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
      for (double alpha : {-1.0, 0.5}) {
        for (int n : {2, 5, 20}) {
          const Matrix e = discrete_matrix(make_power_law(alpha, 0.0, n));
          for (int trial = 0; trial < 100; ++trial) {
            const Vector v = resolvent_discrete(e, lambda, test::random_nonnegative(rng, n));
            worst = std::min(worst, v.minCoeff());
            ++solves;
          }
        }
      }
    }
    return Outcome{worst >= -1e-14,
                   "min entry " + fmt("%.3g", worst) + " over " + std::to_string(solves) + " solves (>= -1e-14)"};
  });

  suite.run("regime transfer (case 1 vs case 2)", 60.0 - case1_seconds - case2_seconds, [&] {
    if (sim1.failure || sim2.failure) return Outcome{false, "integration failed"};
    const double v1 = max_monotonicity_violation(sim1.series, case1.integrator.rel_tol);
    const double v2 = max_monotonicity_violation(sim2.series, case2.integrator.rel_tol);
    const auto t1 = time_to_fraction(sim1.series, MassComponent::discrete, 0.9);
    const auto t2 = time_to_fraction(sim2.series, MassComponent::discrete, 0.9);
    if (!t1 || !t2) return Outcome{false, "M_D never reached 0.9 M(0)"};
    const bool pinned = std::abs(*t1 - kCase1TimeTo90) <= 1e-6 * kCase1TimeTo90 &&
                        std::abs(*t2 - kCase2TimeTo90) <= 1e-6 * kCase2TimeTo90;
    return Outcome{v1 <= 1.0 && v2 <= 1.0 && *t2 < *t1 && pinned,
                   "monotone (worst violation/budget " + fmt("%.3g", std::max(v1, v2)) +
                       "); time to 0.9 M in M_D: case1 " + fmt("%.6f", *t1) + ", case2 " +
                       fmt("%.6f", *t2) + " (case2 < case1, pinned to 1e-6); runs " +
                       fmt("%.2f s", case1_seconds + case2_seconds)};
  });

  std::printf("%d criteria failed\n", suite.failures());
  return suite.failures() == 0 ? 0 : 1;
}
