#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "tmde/families.hpp"
#include "tmde/qcore.hpp"

using namespace tmde;
using Catch::Approx;

namespace {

Matrix8c to_matrix(const oracle::Rho &r) {
  Matrix8c m;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      m(i, j) = r[i][j];
  return m;
}

SettingsTriple to_settings(const oracle::Angles &a) {
  SettingsTriple s;
  for (std::size_t m = 0; m < 6; ++m)
    s.parties[m / 2][m % 2] = QubitMeasurement{a[m][0], a[m][1]};
  return s;
}

double max_diff(const std::array<double, 64> &p, const std::array<double, 64> &q) {
  double d = 0;
  for (std::size_t i = 0; i < 64; ++i)
    d = std::max(d, std::abs(p[i] - q[i]));
  return d;
}

} // namespace

TEST_CASE("PureState rejects unnormalized input and renormalizes") {
  Vector8c v = Vector8c::Zero();
  v[0] = 1.0;
  v[7] = 0.5;
  CHECK_THROWS_AS(PureState(v), invalid_value);
  const PureState ok = PureState::normalized(v);
  CHECK(ok.amplitudes().norm() == Approx(1.0).margin(1e-15));
  CHECK_THROWS_AS(PureState::normalized(Vector8c::Zero()), invalid_value);
}

TEST_CASE("DensityMatrix validation") {
  Matrix8c m = Matrix8c::Identity() / 8.0;
  CHECK_NOTHROW(DensityMatrix(m));
  Matrix8c bad_trace = m * 2.0;
  CHECK_THROWS_AS(DensityMatrix(bad_trace), invalid_value);
  Matrix8c not_hermitian = m;
  not_hermitian(0, 1) = complex_t(0.0, 0.01);
  CHECK_THROWS_AS(DensityMatrix(not_hermitian), invalid_value);
  Matrix8c negative = Matrix8c::Zero();
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(negative), invalid_value);
}

TEST_CASE("density_from_pure examples") {
  const DensityMatrix basis = density_from_pure(PureState::basis(0));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      CHECK(std::abs(basis(i, j) - complex_t(i == 0 && j == 0 ? 1.0 : 0.0)) < 1e-15);

  Vector8c g = Vector8c::Zero();
  g[0] = g[7] = 1.0 / std::sqrt(2.0);
  const DensityMatrix ghz = density_from_pure(PureState(g));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const bool corner = (i == 0 || i == 7) && (j == 0 || j == 7);
      CHECK(std::abs(ghz(i, j) - complex_t(corner ? 0.5 : 0.0)) < 1e-15);
    }

  // cos(theta) = 1/3 removes the |111> tail: equal weights on 011, 101, 110
  const DensityMatrix w = density_from_pure(theta_state(ThetaSetting(std::acos(1.0 / 3))));
  for (int i : {3, 5, 6})
    for (int j : {3, 5, 6})
      CHECK(std::abs(w(i, j) - complex_t(1.0 / 3)) < 1e-12);
  CHECK(std::abs(w(7, 7)) < 1e-12);
}

TEST_CASE("projector examples and completeness") {
  const Matrix2c z0 = projector({0.0, 0.0}, 0);
  const Matrix2c z1 = projector({0.0, 0.0}, 1);
  CHECK(std::abs(z0(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(z0(1, 1)) < 1e-15);
  CHECK(std::abs(z1(1, 1) - 1.0) < 1e-15);
  const Matrix2c x0 = projector({std::numbers::pi / 2, 0.0}, 0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(x0(i, j) - 0.5) < 1e-15);
  CHECK_THROWS_AS(projector({0.0, 0.0}, 2), invalid_value);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 200; ++k) {
    const QubitMeasurement m{u(rng), u(rng)};
    const Matrix2c p0 = projector(m, 0), p1 = projector(m, 1);
    CHECK((p0 + p1 - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p0 * p0 - p0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p0 - p0.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(m.basis_vector(0).dot(m.basis_vector(1))) < 1e-12);
  }
}

TEST_CASE("BehaviorTensor construction") {
  std::array<double, 64> p{};
  p.fill(0.125);
  p[0] = 0.125 - 1e-13;
  p[1] = 0.125 + 1e-13;
  CHECK_NOTHROW(BehaviorTensor::from_probabilities(p));
  p[0] = -1e-3;
  p[1] = 0.125 + 0.125 + 1e-3;
  CHECK_THROWS_AS(BehaviorTensor::from_probabilities(p), invalid_value);
  p.fill(0.125);
  p[9] = 0.2;
  CHECK_THROWS_AS(BehaviorTensor::from_probabilities(p), invalid_value);
  p.fill(0.125);
  p[0] = -5e-13;
  p[1] = 0.125 + 0.125 + 5e-13;
  CHECK(BehaviorTensor::from_probabilities(p)(0, 0, 0, 0, 0, 0) == 0.0);
  CHECK(BehaviorTensor::index(1, 0, 1, 0, 1, 1) == oracle::at(1, 0, 1, 0, 1, 1));
}

TEST_CASE("Born rule examples") {
  Vector8c g = Vector8c::Zero();
  g[0] = g[7] = 1.0 / std::sqrt(2.0);
  const auto zz = SettingsTriple::identical({0.0, 0.0}, {0.0, 0.0});
  const BehaviorTensor t = behavior_from_settings(density_from_pure(PureState(g)), zz);
  for (int s = 0; s < 8; ++s) {
    CHECK(t(0, 0, 0, s >> 2, (s >> 1) & 1, s & 1) == Approx(0.5).margin(1e-15));
    CHECK(t(1, 1, 1, s >> 2, (s >> 1) & 1, s & 1) == Approx(0.5).margin(1e-15));
  }

  for (double theta : {0.1, 0.5, 0.9}) {
    const ThetaSetting ts(theta);
    const BehaviorTensor b = behavior_from_state(theta_state(ts), theta_measurements(ts));
    const double k2s4 = ts.k_squared() * std::pow(std::sin(theta), 4);
    for (int s = 0; s < 8; ++s) {
      const int ones = __builtin_popcount(static_cast<unsigned>(s));
      const double got = b(0, 0, 0, s >> 2, (s >> 1) & 1, s & 1);
      if (ones <= 1)
        CHECK(got == Approx(0.0).margin(1e-15));
      else if (ones == 2)
        CHECK(got == Approx(k2s4).margin(1e-15));
    }
  }
}

TEST_CASE("Born rule agrees with the independent oracle") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const auto rho = oracle::random_rho(rng, 1 + k % 8);
    const auto angles = oracle::random_angles(rng);
    const auto expect = oracle::born(rho, angles);
    const BehaviorTensor t =
        behavior_from_settings(DensityMatrix(to_matrix(rho)), to_settings(angles));
    CHECK(max_diff(t.data(), expect) < 1e-12);
    CHECK(no_signaling_deviation(t) < 1e-10);
  }
}

TEST_CASE("pure fast path matches the trace form") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 200; ++k) {
    const auto rho = oracle::random_rho(rng, 1);
    Vector8c v;
    for (int i = 0; i < 8; ++i)
      v[i] = rho[i][0];
    const PureState psi = PureState::normalized(v);
    const SettingsTriple s = to_settings(oracle::random_angles(rng));
    CHECK(max_diff(behavior_from_state(psi, s).data(),
                   behavior_from_settings(density_from_pure(psi), s).data()) < 1e-12);
  }
}

TEST_CASE("Born rule is linear in the state") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 100; ++k) {
    const Matrix8c r1 = to_matrix(oracle::random_rho(rng, 3));
    const Matrix8c r2 = to_matrix(oracle::random_rho(rng, 1));
    const double lambda = u(rng);
    const SettingsTriple s = to_settings(oracle::random_angles(rng));
    const auto mixed =
        behavior_from_settings(DensityMatrix(lambda * r1 + (1 - lambda) * r2), s);
    const auto t1 = behavior_from_settings(DensityMatrix(r1), s);
    const auto t2 = behavior_from_settings(DensityMatrix(r2), s);
    for (std::size_t i = 0; i < 64; ++i)
      CHECK(std::abs(mixed.data()[i] - (lambda * t1.data()[i] + (1 - lambda) * t2.data()[i])) < 1e-12);
  }
}

TEST_CASE("no-signaling deviation detects a signaling tensor") {
  // B outputs A's setting
  std::array<double, 64> p{};
  for (int s = 0; s < 8; ++s)
    p[BehaviorTensor::index(0, s >> 2, 0, s >> 2, (s >> 1) & 1, s & 1)] = 1.0;
  CHECK(no_signaling_deviation(BehaviorTensor::from_probabilities(p)) == 1.0);
  CHECK(no_signaling_deviation(BehaviorTensor::uniform()) == 0.0);
}
