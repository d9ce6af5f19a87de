#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "tmde/detector.hpp"

using namespace tmde;

namespace {

BehaviorTensor random_tensor(std::mt19937_64 &rng, int i) {
  return BehaviorTensor::from_probabilities(oracle::random_behavior(rng, i));
}

} // namespace

TEST_CASE("efficiencies must lie in [0,1]") {
  CHECK_THROWS_AS(EfficiencyTriple(1.1, 1, 1), invalid_value);
  CHECK_THROWS_AS(EfficiencyTriple(1, -0.1, 1), invalid_value);
  CHECK_THROWS_AS(EfficiencyTriple(1, 1, std::nan("")), invalid_value);
  CHECK_NOTHROW(EfficiencyTriple(0, 1, 0.5));
}

TEST_CASE("perfect and dead detectors") {
  std::mt19937_64 rng(1);
  const BehaviorTensor t = random_tensor(rng, 0);
  CHECK(observe(t, EfficiencyTriple::symmetric(1.0)).data() == t.data());
  const BehaviorTensor dead = observe(t, EfficiencyTriple::symmetric(0.0));
  for (int s = 0; s < 8; ++s)
    CHECK(dead(1, 1, 1, s >> 2, (s >> 1) & 1, s & 1) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("channel matches click-pattern enumeration") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const auto ideal = oracle::random_behavior(rng, i);
    const std::array<double, 3> eta{u(rng), u(rng), u(rng)};
    const auto expect = oracle::observe(ideal, eta);
    const auto got = observe(BehaviorTensor::from_probabilities(ideal),
                             EfficiencyTriple(eta[0], eta[1], eta[2]));
    for (std::size_t k = 0; k < 64; ++k)
      CHECK(std::abs(got.data()[k] - expect[k]) < 1e-14);
  }
}

TEST_CASE("channel preserves normalization and no-signaling") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const BehaviorTensor t = random_tensor(rng, i);
    const BehaviorTensor o = observe(t, EfficiencyTriple(u(rng), u(rng), u(rng)));
    for (int s = 0; s < 8; ++s) {
      double sum = 0;
      for (int k = 0; k < 8; ++k)
        sum += o.data()[static_cast<std::size_t>(8 * s + k)];
      REQUIRE(std::abs(sum - 1.0) < 1e-12);
    }
    REQUIRE(no_signaling_deviation(o) < 1e-10);
  }
}

TEST_CASE("channel composition") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const BehaviorTensor t = random_tensor(rng, i);
    const EfficiencyTriple e1(u(rng), u(rng), u(rng)), e2(u(rng), u(rng), u(rng));
    const auto twice = observe(observe(t, e1), e2);
    const auto once = observe(t, e1 * e2);
    for (std::size_t k = 0; k < 64; ++k)
      REQUIRE(std::abs(twice.data()[k] - once.data()[k]) < 1e-12);
  }
}
