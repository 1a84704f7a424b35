#include <doctest.h>

#include <cmath>
#include <random>

#include "frag/errors.hpp"
#include "frag/kernels.hpp"

using namespace frag;

TEST_CASE("power law ingredients") {
  const auto m = make_power_law(-1.0, 0.0, 5);
  CHECK(m.rate(10.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(m.daughter(6.0, 10.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(m.discrete_daughter(1, 3) == 1.0);
  CHECK(m.daughter(11.0, 10.0) == 0.0);
  CHECK(m.discrete_rate(1) == 0.0);
  CHECK(m.discrete_rate(4) == doctest::Approx(0.25));
  REQUIRE(m.power_law());
  CHECK(m.power_law()->alpha == -1.0);
}

TEST_CASE("exponent zero gives unit rates except for monomers") {
  const auto m = make_power_law(0.0, 0.0, 1);
  CHECK(m.discrete_rate(1) == 0.0);
  for (double x : {1.5, 7.0, 1e4}) CHECK(m.rate(x) == 1.0);
  const auto m3 = make_power_law(0.0, 0.0, 3);
  CHECK(m3.discrete_rate(2) == 1.0);
  CHECK(m3.discrete_rate(3) == 1.0);
}

TEST_CASE("make_power_law rejects inadmissible parameters") {
  CHECK_THROWS_AS(make_power_law(-1.0, -3.0, 5), DomainError);
  CHECK_THROWS_AS(make_power_law(-1.0, -2.0, 5), DomainError);
  CHECK_THROWS_AS(make_power_law(-1.0, 0.5, 5), DomainError);
  CHECK_THROWS_AS(make_power_law(-1.0, 0.0, 0), DomainError);
}

TEST_CASE("custom models must keep monomers inert") {
  FragmentationModel::Ingredients in;
  in.cutoff = 2;
  in.rate = [](double) { return 1.0; };
  in.daughter = [](double, double) { return 0.0; };
  in.transfer = [](int, double) { return 0.0; };
  in.discrete_daughter = [](int, int) { return 0.0; };
  in.discrete_rates = {0.5, 1.0};
  CHECK_THROWS_AS(FragmentationModel{in}, DomainError);
  in.discrete_rates = {0.0};
  CHECK_THROWS_AS(FragmentationModel{in}, DomainError);
  in.discrete_rates = {0.0, -1.0};
  CHECK_THROWS_AS(FragmentationModel{in}, DomainError);
}

TEST_CASE("continuous balance examples") {
  const auto m = make_power_law(-1.0, 0.0, 5);
  // int_5^10 x (2/10) dx = 7.5 and sum j b_j(10) = 2.5.
  const auto r = validate_continuous_balance(m, {10.0}, 1e-10);
  REQUIRE(r.size() == 1);
  CHECK(r[0].converged);
  CHECK(r[0].residual < 1e-15);

  const auto leaky = without_transfer(m);
  CHECK(validate_continuous_balance(leaky, {10.0})[0].residual ==
        doctest::Approx(0.25).epsilon(1e-12));

  // Near the cutoff the discrete daughters carry all of the mass.
  CHECK(validate_continuous_balance(m, {5.0 + 1e-9})[0].residual < 1e-12);
  CHECK_THROWS_AS(validate_continuous_balance(m, {5.0}), DomainError);
}

TEST_CASE("discrete balance examples") {
  const auto m = make_power_law(0.5, -0.5, 5);
  const auto r = validate_discrete_balance(m);
  REQUIRE(r.size() == 4);
  CHECK(r[0] == 0.0);  // i = 2: 1 * 2/1
  CHECK(r[3] < 1e-15);  // i = 5: sum j * 2/4
  CHECK(validate_discrete_balance(make_power_law(0.5, -0.5, 1)).empty());

  auto in = m.ingredients();
  in.discrete_daughter = [](int, int) { return 0.0; };
  const FragmentationModel empty(in);
  CHECK(validate_discrete_balance(empty)[1] == 3.0);
}

TEST_CASE("honesty hypothesis sampling") {
  const auto decreasing = check_honesty_hypothesis(make_power_law(-1.0, 0.0, 5), 15.0, 60);
  CHECK(decreasing.finite);
  CHECK(decreasing.sup_near_cutoff == doctest::Approx(0.2).epsilon(1e-12));

  const auto increasing = check_honesty_hypothesis(make_power_law(0.5, 0.0, 5), 15.0, 60);
  CHECK(increasing.finite);
  CHECK(increasing.sup_local == doctest::Approx(std::sqrt(15.0)).epsilon(1e-15));

  auto in = make_power_law(0.5, 0.0, 5).ingredients();
  in.rate = [](double x) { return 1.0 / (x - 5.0); };
  const FragmentationModel blowup(in);
  CHECK_FALSE(check_honesty_hypothesis(blowup, 15.0, 80).finite);
  CHECK_THROWS_AS(check_honesty_hypothesis(blowup, 5.0, 10), DomainError);
  CHECK_THROWS_AS(check_honesty_hypothesis(blowup, 15.0, 1), DomainError);
}

TEST_CASE("property: balance residuals of random power-law models") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> alpha(-2.0, 2.0);
  std::uniform_real_distribution<double> nu(-1.999, 0.0);
  std::uniform_real_distribution<double> log_y(0.0, 1.0);
  constexpr double kTol = 1e-10;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 20);
    const auto m = make_power_law(alpha(rng), nu(rng), n);
    std::vector<double> ys;
    // Log-uniform over (N, 1e6].
    for (int k = 0; k < 8; ++k) ys.push_back(n * std::pow(1e6 / n, log_y(rng)) + 1e-9);
    ys.push_back(1e6);
    for (const auto& s : validate_continuous_balance(m, ys, kTol)) {
      CAPTURE(s.y);
      CHECK(s.converged);
      CHECK(s.residual < 10.0 * kTol / s.y);
    }
    const auto disc = validate_discrete_balance(m);
    for (std::size_t k = 0; k < disc.size(); ++k) {
      CHECK(disc[k] <= 1e-12 * static_cast<double>(k + 2));
    }
  }
}

TEST_CASE("property: kernels are nonnegative and deterministic") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = -2.0 + 4.0 * unit(rng);
    const double v = -1.99 + 1.99 * unit(rng);
    const auto m1 = make_power_law(a, v, 6);
    const auto m2 = make_power_law(a, v, 6);
    CHECK(m1.discrete_rate(1) == 0.0);
    for (int k = 0; k < 30; ++k) {
      const double y = 6.0 + 100.0 * unit(rng);
      const double x = 6.0 + (y - 6.0) * unit(rng);
      CHECK(m1.daughter(x, y) >= 0.0);
      CHECK(m1.daughter(x, y) == m2.daughter(x, y));
      CHECK(m1.rate(y) == m2.rate(y));
      for (int i = 1; i <= 6; ++i) {
        CHECK(m1.transfer(i, y) >= 0.0);
        CHECK(m1.transfer(i, y) == m2.transfer(i, y));
        CHECK(m1.discrete_rate(i) >= 0.0);
      }
    }
  }
}

TEST_CASE("balance gate") {
  CHECK(max_balance_residual(make_power_law(-1.0, 0.0, 5), 15.0) < kBalanceGate);
  CHECK(max_balance_residual(without_transfer(make_power_law(-1.0, 0.0, 5)), 15.0) >
        kBalanceGate);
}
