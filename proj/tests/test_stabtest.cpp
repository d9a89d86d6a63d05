#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "specrad/stabtest.hpp"

using namespace specrad;

TEST_CASE("three-way decision") {
  SUBCASE("clear stabilizability") {
    const ChannelTrace trace{std::vector<std::uint8_t>(1000, 0)};
    ChannelTrace t = trace;
    for (std::size_t i = 0; i < 750; ++i) t.gammas[i] = 1;
    const auto v = stabilizability_test(1.15, 0.1, t, 0.01);
    CHECK(v.outcome == Outcome::holds);
    CHECK(v.q_hat == 0.75);
    CHECK(std::abs(v.f5 - 0.051470) < 1e-5);
    REQUIRE(v.thresholds.holds_rhs);
    CHECK(*v.thresholds.holds_rhs == doctest::Approx(1.8212852275).epsilon(1e-9));
    REQUIRE(v.thresholds.not_holds_rhs);
  }
  SUBCASE("clear non-stabilizability") {
    const auto v = decide_stabilizability(0.5, 0.05, 2.5, 0.1);
    CHECK(v.outcome == Outcome::does_not_hold);
    CHECK(*v.thresholds.not_holds_rhs == doctest::Approx(std::sqrt(1.0 / 0.45)));
    CHECK(*v.thresholds.not_holds_rhs == doctest::Approx(1.4907).epsilon(1e-4));
  }
  SUBCASE("too few channel samples") {
    const auto v = stabilizability_test(1.15, 0.1, ChannelTrace{{1, 0, 1}}, 0.01);
    CHECK(v.outcome == Outcome::undetermined);
    CHECK(*v.thresholds.holds_rhs == doctest::Approx(0.8862955875).epsilon(1e-9));
    CHECK_FALSE(v.thresholds.not_holds_rhs.has_value());
  }
  SUBCASE("ties are undetermined") {
    // q_hat = 0.5, f5 = 0.25: holds threshold sqrt(1/0.75), not-holds threshold 2
    const double h = std::sqrt(1.0 / 0.75);
    CHECK(decide_stabilizability(0.5, 0.25, h, 0.0).outcome == Outcome::undetermined);
    CHECK(decide_stabilizability(0.5, 0.25, 2.0, 0.0).outcome == Outcome::undetermined);
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(stabilizability_test(-1.0, 0.1, ChannelTrace{{1}}, 0.1), DomainError);
    CHECK_THROWS_AS(stabilizability_test(1.0, -0.1, ChannelTrace{{1}}, 0.1), DomainError);
    CHECK_THROWS_AS(stabilizability_test(1.0, 0.1, ChannelTrace{}, 0.1), DomainError);
    CHECK_THROWS_AS(stabilizability_test(1.0, 0.1, ChannelTrace{{1}}, 1.5), DomainError);
  }
}

TEST_CASE("decision properties") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0), rho(0.0, 4.0), eps(0.0, 1.0);
  for (int trial = 0; trial < 20000; ++trial) {
    const double q_hat = unit(gen), f5 = 0.5 * unit(gen) + 1e-9, r = rho(gen), e = eps(gen);
    const auto v = decide_stabilizability(q_hat, f5, r, e);
    const bool branch1 = q_hat - f5 < 1.0 && r + e < std::sqrt(1.0 / (1.0 - q_hat + f5));
    const bool branch2 = q_hat + f5 < 1.0 && r - e > std::sqrt(1.0 / (1.0 - q_hat - f5));
    CHECK_FALSE((branch1 && branch2));
    CHECK((v.outcome == Outcome::holds) == branch1);
    CHECK((v.outcome == Outcome::does_not_hold) == (branch2 && !branch1));

    const auto wider = decide_stabilizability(q_hat, f5, r, e + eps(gen));
    if (v.outcome == Outcome::undetermined) CHECK(wider.outcome == Outcome::undetermined);
    if (wider.outcome != Outcome::undetermined) CHECK(wider.outcome == v.outcome);
  }
}

TEST_CASE("stab_margin_rhs") {
  CHECK(stab_margin_rhs(1.0) == 0.0);
  CHECK(std::abs(stab_margin_rhs(1.2) - 0.305556) < 1e-6);
  CHECK(stab_margin_rhs(1e8) == doctest::Approx(1.0));
  CHECK_THROWS_AS(stab_margin_rhs(0.0), DomainError);
}

TEST_CASE("verdict_conditions") {
  const SystemTruth truth{0.75, 1.2, 1.21294};

  SUBCASE("N_q = 1000") {
    const auto c = verdict_conditions(truth, 1000, 0.01, 0.01, 0.1);
    CHECK(c.cond_nq1);
    CHECK(c.cond_nq2);
    CHECK(c.cond_eps);
    CHECK(c.epsilon_headroom == doctest::Approx(0.24162686559).epsilon(1e-9));
    CHECK(c.tspp == doctest::Approx(0.9801).epsilon(1e-12));
  }
  SUBCASE("N_q = 3") {
    const auto c = verdict_conditions(truth, 3, 0.01, 0.01, 0.1);
    CHECK_FALSE(c.cond_nq1);
    CHECK(c.tspp == 0.0);
  }
  SUBCASE("tspp tends to 1 as delta, delta_q shrink") {
    CHECK(verdict_conditions(truth, 100000, 1e-9, 1e-9, 0.1).tspp == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("epsilon beyond the headroom") {
    CHECK(verdict_conditions(truth, 1000, 0.01, 0.01, 0.3).tspp == 0.0);
  }
  SUBCASE("second headroom argument") {
    // Non-stabilizable side: q = 0.2, rho = 2, 1 - q - 2 f5 > 0.
    const double f5 = bound_f5(1000, 0.01);
    const double expected = 0.5 * (2.0 - std::sqrt(1.0 / (0.8 - 2.0 * f5)));
    CHECK(epsilon_headroom(0.2, 2.0, f5) == doctest::Approx(expected));
    CHECK(epsilon_headroom(0.9, 1.2, 0.1) == doctest::Approx(0.5 * (std::sqrt(1.0 / 0.3) - 1.2)));
  }
  SUBCASE("boundary case rejected") {
    CHECK_THROWS_AS(verdict_conditions({1.0 - 1.0 / 1.44, 1.2, 1.3}, 1000, 0.01, 0.01, 0.1), DomainError);
  }
}

TEST_CASE("sample_complexity_nq") {
  CHECK(sample_complexity_nq(0.75, 1.2, 0.01) == 170);
  SUBCASE("N_q* satisfies the channel conditions") {
    const std::size_t nq = sample_complexity_nq(0.75, 1.2, 0.01);
    const auto c = verdict_conditions({0.75, 1.2, 1.21294}, nq, 0.01, 0.01, 0.0);
    CHECK(c.cond_nq1);
    CHECK(c.cond_nq2);
    CHECK_FALSE(verdict_conditions({0.75, 1.2, 1.21294}, nq - 1, 0.01, 0.01, 0.0).cond_nq1);
  }
  SUBCASE("scaling") {
    // Margin-bound regime: q = 0.3 against rho = 1.2 gives |margin| = 0.005556.
    const double m1 = std::abs(1.0 - 0.3 - 1.0 / 1.44);
    const double rho2 = 1.0 / std::sqrt(1.0 - 0.3 - m1 / 2.0);  // halves the margin
    const double a = static_cast<double>(sample_complexity_nq(0.3, 1.2, 0.01));
    const double b = static_cast<double>(sample_complexity_nq(0.3, rho2, 0.01));
    CHECK(b / a == doctest::Approx(4.0).epsilon(1e-3));
    const double t1 = 32.0 * std::log(200.0), t2 = 32.0 * std::log(20.0);
    CHECK(t1 / t2 == doctest::Approx(1.769).epsilon(1e-3));
    CHECK(sample_complexity_nq(0.75, 1.2, 0.1) == static_cast<std::uint64_t>(std::floor(t2)) + 1);
  }
  CHECK_THROWS_AS(sample_complexity_nq(1.0 - 1.0 / 1.44, 1.2, 0.01), DomainError);
  CHECK_THROWS_AS(sample_complexity_nq(0.0, 1.2, 0.01), DomainError);
}

TEST_CASE("sample_complexity_n_for_test") {
  SUBCASE("reference system is infeasible") {
    for (std::size_t nq : {170u, 1000u, 1000000u}) {
      CHECK_THROWS_WITH_AS(sample_complexity_n_for_test(reference_system(), 5, 0.75, nq, 0.01, 0.01),
                           doctest::Contains("2(1-1/n)||A||"), InfeasibleError);
    }
  }
  SUBCASE("N_q below the floor") {
    CHECK_THROWS_AS(sample_complexity_n_for_test(reference_system(), 5, 0.75, 100, 0.01, 0.01), PreconditionError);
  }
  SUBCASE("scalar surrogate matches the spectral-radius planner") {
    const LtiSystem scalar(Matrix{{0.5}}, Matrix{{1.0}}, 0.1, 0.1);
    // rho = 0.5 so 1 - 1/rho^2 = -3; any q in (0,1) is stabilizable.
    const auto plan = sample_complexity_n_for_test(scalar, 0, 0.75, 1000, 0.1, 0.01, 0.1);
    CHECK(plan.trajectories == 226027);
    CHECK(plan.b == 0.1);
    CHECK(plan.trajectories == sample_complexity_rho(scalar, 0, 0.1, 0.1));
    const auto derived = sample_complexity_n_for_test(scalar, 0, 0.75, 1000, 0.1, 0.01);
    CHECK(derived.epsilon == doctest::Approx(epsilon_headroom(0.75, 0.5, bound_f5(1000, 0.01))));
    CHECK(derived.trajectories == sample_complexity_rho(scalar, 0, derived.epsilon, 0.1));
  }
}

TEST_CASE("verdict frequency meets the guaranteed probability") {
  // rho_hat = 1.15 with eps = 0.1 covers rho = 1.2; channel is the only random part.
  const std::size_t runs = 400;
  const SystemTruth truth{0.75, 1.2, 1.21294};
  for (std::size_t nq : {170u, 300u, 1000u}) {
    const auto cond = verdict_conditions(truth, nq, 0.01, 0.01, 0.1);
    REQUIRE(cond.all());
    std::size_t correct = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto v = stabilizability_test(1.15, 0.1, simulate_channel(0.75, nq, {555, nq * 1000 + r}), 0.01);
      if (v.outcome == Outcome::holds) ++correct;
    }
    const double espr = static_cast<double>(correct) / runs;
    CHECK(espr >= cond.tspp - 3.0 * specrad::testing::binomial_se(cond.tspp, runs));
  }
}
