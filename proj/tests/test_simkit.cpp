#include <chrono>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "specrad/rng.hpp"
#include "specrad/simkit.hpp"

using namespace specrad;

TEST_CASE("philox known-answer block") {
  // Random123 reference vector for philox4x32-10, counter = key = 0.
  const auto out = PhiloxStream::block({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);
  const auto ones = PhiloxStream::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("normal draws have unit variance") {
  PhiloxStream rng({42, 7});
  double sum = 0.0, sq = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / count;
  const double var = sq / count - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(count));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / count));
}

TEST_CASE("simulate_trajectory") {
  const LtiSystem sys = reference_system();

  SUBCASE("shape and zero initial state") {
    const auto tr = simulate_trajectory(sys, 5, {1, 2});
    CHECK(tr.inputs.size() == 6);
    CHECK(tr.states.size() == 7);
    CHECK(tr.states[0] == Vector{0.0, 0.0});
    CHECK(tr.horizon() == 5);
  }
  SUBCASE("same seed gives bit-identical output") {
    CHECK(simulate_trajectory(sys, 5, {9, 3}) == simulate_trajectory(sys, 5, {9, 3}));
    CHECK(!(simulate_trajectory(sys, 5, {9, 3}) == simulate_trajectory(sys, 5, {9, 4})));
  }
  SUBCASE("noiseless run with injected input follows the recursion") {
    const auto tr = propagate(sys, {{1.0}});
    CHECK(tr.states[1] == sys.B().col(0));
    SimOptions opts;
    opts.noiseless = true;
    const auto quiet = simulate_trajectory(sys, 3, {5, 5}, opts);
    for (std::size_t t = 0; t < quiet.inputs.size(); ++t) {
      Vector expect = sys.A() * quiet.states[t];
      const Vector bu = sys.B() * quiet.inputs[t];
      for (std::size_t i = 0; i < 2; ++i) CHECK(quiet.states[t + 1][i] == doctest::Approx(expect[i] + bu[i]));
    }
    // Noiseless and noisy runs share the same inputs.
    CHECK(quiet.inputs == simulate_trajectory(sys, 3, {5, 5}).inputs);
  }
  SUBCASE("nonzero initial state hook") {
    SimOptions opts;
    opts.x0 = Vector{1.0, -1.0};
    CHECK(simulate_trajectory(sys, 2, {1, 1}, opts).states[0] == Vector{1.0, -1.0});
    opts.x0 = Vector{1.0};
    CHECK_THROWS_AS(simulate_trajectory(sys, 2, {1, 1}, opts), DimensionError);
  }
  SUBCASE("x_1 covariance matches sigma_u^2 B B^T + sigma_w^2 I") {
    const std::size_t seeds = 10000;
    double s00 = 0.0, s11 = 0.0;
    for (std::size_t k = 0; k < seeds; ++k) {
      const auto tr = simulate_trajectory(sys, 5, {2024, k});
      s00 += tr.states[1][0] * tr.states[1][0];
      s11 += tr.states[1][1] * tr.states[1][1];
    }
    CHECK(std::abs(s00 / seeds - 0.01) / 0.01 < 0.05);
    CHECK(std::abs(s11 / seeds - 0.02) / 0.02 < 0.05);
  }
}

TEST_CASE("simulate_ensemble") {
  const LtiSystem sys = reference_system();
  const RngSeed seed{77, 1};

  SUBCASE("N = 1 equals simulate_trajectory") {
    const auto e = simulate_ensemble(sys, 5, 1, seed);
    REQUIRE(e.size() == 1);
    CHECK(e[0] == simulate_trajectory(sys, 5, seed));
  }
  SUBCASE("trajectory i does not depend on N or thread count") {
    const auto small = simulate_ensemble(sys, 5, 10, seed);
    const auto big = simulate_ensemble(sys, 5, 50, seed, {}, 4);
    for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == big[i]);
    CHECK(!(small[0] == small[1]));
  }
  SUBCASE("N = 0 rejected") { CHECK_THROWS_AS(simulate_ensemble(sys, 5, 0, seed), DomainError); }
  SUBCASE("N = 1000 is fast") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = simulate_ensemble(sys, 5, 1000, seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(e.size() == 1000);
    CHECK(secs < 1.0);
  }
}

TEST_CASE("tuple extraction") {
  const LtiSystem sys = reference_system();
  SimOptions opts;
  opts.record_noise = true;

  SUBCASE("pool_tuples counts") {
    CHECK(pool_tuples(simulate_ensemble(sys, 5, 1, {1, 0})).size() == 6);
    CHECK(pool_tuples(simulate_ensemble(sys, 5, 10, {1, 0})).size() == 60);
  }
  SUBCASE("last_tuples picks (u_T, x_T, x_{T+1})") {
    const auto trajs = simulate_ensemble(sys, 5, 7, {1, 0});
    const auto last = last_tuples(trajs);
    REQUIRE(last.size() == 7);
    for (std::size_t i = 0; i < last.size(); ++i) {
      CHECK(last[i].x == trajs[i].states[5]);
      CHECK(last[i].x_plus == trajs[i].states[6]);
      CHECK(last[i].u == trajs[i].inputs[5]);
    }
  }
  SUBCASE("T = 0: last_tuples equals pool_tuples") {
    const auto trajs = simulate_ensemble(sys, 0, 4, {3, 0});
    const auto a = last_tuples(trajs);
    const auto b = pool_tuples(trajs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x == b[i].x);
      CHECK(a[i].u == b[i].u);
      CHECK(a[i].x_plus == b[i].x_plus);
    }
  }
  SUBCASE("empty input rejected") {
    CHECK_THROWS_AS(pool_tuples({}), DomainError);
    CHECK_THROWS_AS(last_tuples({}), DomainError);
  }
  SUBCASE("residual identity recovers the injected noise") {
    const auto trajs = simulate_ensemble(sys, 5, 20, {8, 8}, opts);
    for (const auto& tuples : {pool_tuples(trajs), last_tuples(trajs)}) {
      for (const auto& d : tuples) {
        REQUIRE(d.noise.has_value());
        const Vector ax = sys.A() * d.x;
        const Vector bu = sys.B() * d.u;
        for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(d.x_plus[i] - ax[i] - bu[i] - (*d.noise)[i]) < 1e-15);
      }
    }
  }
  SUBCASE("injected noise is serially uncorrelated") {
    const auto trajs = simulate_ensemble(sys, 20, 500, {4, 4}, opts);
    double cross = 0.0, sq = 0.0;
    std::size_t pairs = 0;
    for (const auto& tr : trajs) {
      const auto& w = *tr.noises;
      for (std::size_t t = 0; t + 1 < w.size(); ++t) {
        for (std::size_t i = 0; i < 2; ++i) {
          cross += w[t][i] * w[t + 1][i];
          sq += w[t][i] * w[t][i];
        }
        pairs += 2;
      }
    }
    CHECK(std::abs(cross / sq) < 3.0 / std::sqrt(static_cast<double>(pairs)));
  }
}

TEST_CASE("simulate_channel") {
  CHECK(simulate_channel(0.3, 50, {1, 1}).gammas == simulate_channel(0.3, 50, {1, 1}).gammas);
  CHECK_THROWS_AS(simulate_channel(0.0, 10, {1, 1}), DomainError);
  CHECK_THROWS_AS(simulate_channel(1.0, 10, {1, 1}), DomainError);
  CHECK_THROWS_AS(simulate_channel(0.5, 0, {1, 1}), DomainError);

  const auto near_one = simulate_channel(1.0 - 1e-12, 100, {2, 2});
  double ones = 0.0;
  for (auto g : near_one.gammas) ones += g;
  CHECK(ones / 100.0 >= 0.99);

  const auto big = simulate_channel(0.75, 100000, {3, 3});
  double mean = 0.0;
  for (auto g : big.gammas) mean += g;
  mean /= 100000.0;
  CHECK(std::abs(mean - 0.75) < 0.01);
}
