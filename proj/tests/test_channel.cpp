#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "specrad/channel.hpp"

using namespace specrad;

TEST_CASE("estimate_q") {
  CHECK(estimate_q(ChannelTrace{{1, 0, 1, 1}}) == 0.75);
  for (std::size_t len : {1u, 7u, 1000u}) CHECK(estimate_q(ChannelTrace{std::vector<std::uint8_t>(len, 1)}) == 1.0);
  CHECK_THROWS_AS(estimate_q(ChannelTrace{}), DomainError);
  CHECK_THROWS_AS(estimate_q(ChannelTrace{{1, 2}}), DomainError);
  CHECK(std::abs(estimate_q(simulate_channel(0.75, 100000, {12, 0})) - 0.75) < 0.01);
}

TEST_CASE("bound_f5") {
  CHECK(bound_f5(1000, 0.01) == doctest::Approx(std::sqrt(std::log(200.0) / 2000.0)).epsilon(1e-14));
  CHECK(std::abs(bound_f5(1000, 0.01) - 0.051470) < 1e-5);
  CHECK(std::abs(bound_f5(100, 0.1) - 0.122388) < 1e-5);
  CHECK(bound_f5(4000, 0.03) == doctest::Approx(bound_f5(1000, 0.03) / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(bound_f5(0, 0.1), DomainError);
  CHECK_THROWS_AS(bound_f5(10, 0.0), DomainError);
  CHECK_THROWS_AS(bound_f5(10, 1.0), DomainError);

  SUBCASE("strictly decreasing in N_q and delta_q") {
    for (std::size_t n = 1; n < 5000; n = n * 2 + 1) CHECK(bound_f5(n + 1, 0.05) < bound_f5(n, 0.05));
    for (double d = 0.001; d < 0.95; d *= 1.5) CHECK(bound_f5(50, d * 1.5) < bound_f5(50, d));
  }
}

TEST_CASE("estimate_channel bundles the estimate and radius") {
  const auto est = estimate_channel(ChannelTrace{{1, 0, 1}}, 0.01);
  CHECK(est.q_hat == doctest::Approx(2.0 / 3.0));
  CHECK(est.f5 == doctest::Approx(0.9397089413));
  CHECK(est.n_samples == 3);
  CHECK(est.delta_q == 0.01);
}

TEST_CASE("Hoeffding coverage") {
  const std::size_t traces = 5000;
  std::size_t misses = 0;
  const double f5 = bound_f5(100, 0.1);
  for (std::size_t r = 0; r < traces; ++r) {
    if (std::abs(estimate_q(simulate_channel(0.75, 100, {99, r})) - 0.75) > f5) ++misses;
  }
  MESSAGE("violation rate " << static_cast<double>(misses) / traces);
  CHECK(static_cast<double>(misses) / traces <= 0.1);
}
