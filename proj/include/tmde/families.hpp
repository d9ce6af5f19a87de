#pragma once

// Parameterized quantum settings: the one-parameter theta family that
// saturates the B_T2 efficiency condition, GHZ with equatorial measurements,
// and white-noise mixing.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "tmde/qcore.hpp"

namespace tmde {

class ThetaSetting {
public:
  explicit ThetaSetting(double theta) : theta_(theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi) ||
        std::sin(theta) < 1e-9)
      throw invalid_value("theta " + std::to_string(theta) +
                          " outside (0, pi) or too close to a multiple of pi");
  }
  double theta() const { return theta_; }

  /// Coefficient of |111> relative to the permutation labels.
  double tail() const {
    return (1.0 - 3.0 * std::cos(theta_)) / std::sin(theta_);
  }
  /// k^2 = sin^2 / (3 sin^2 + (1 - 3 cos)^2)
  double k_squared() const {
    const double s = std::sin(theta_);
    const double c = std::cos(theta_);
    return s * s / (3.0 * s * s + (1.0 - 3.0 * c) * (1.0 - 3.0 * c));
  }

private:
  double theta_;
};

class NoiseLevel {
public:
  explicit NoiseLevel(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw invalid_value("noise level " + std::to_string(p) +
                          " outside [0,1]");
  }
  double p() const { return p_; }

private:
  double p_;
};

/// k [ |011> + |101> + |110> + tail |111> ]
inline PureState theta_state(const ThetaSetting &s) {
  const double k = std::sqrt(s.k_squared());
  Vector8c v = Vector8c::Zero();
  v[3] = k;
  v[5] = k;
  v[6] = k;
  v[7] = k * s.tail();
  return PureState(v);
}

/// Setting 0: computational basis. Setting 1: outcome 0 along
/// cos(theta)|0> + sin(theta)|1>. Identical for all three parties.
inline SettingsTriple theta_measurements(const ThetaSetting &s) {
  return SettingsTriple::identical(QubitMeasurement{0.0, 0.0},
                                   QubitMeasurement{2.0 * s.theta(), 0.0});
}

/// Closed-form ideal probabilities of the theta family.
struct ThetaClosedForm {
  double k_squared;
  /// P(000|A_i B_j C_k) when at least two settings are 0
  double triple_mostly_zero;
  /// P(000|...) with exactly two settings equal to 1, and with all three
  double triple_two_ones;
  double triple_all_ones;
  /// P(00|X_1 Y_1) for every pair
  double pair_ones;

  explicit ThetaClosedForm(const ThetaSetting &s) {
    const double sin_t = std::sin(s.theta());
    const double half_tan = std::tan(0.5 * s.theta());
    k_squared = s.k_squared();
    const double base = k_squared * std::pow(sin_t, 4);
    triple_mostly_zero = 0.0;
    triple_two_ones = base;
    triple_all_ones = base;
    pair_ones = base * (1.0 + half_tan * half_tan);
  }

  /// Symmetric B_T2 cut-off efficiency, 3 / (4 cos^2(theta/2)).
  static double t2_cde(double theta) {
    const double c = std::cos(0.5 * theta);
    return 3.0 / (4.0 * c * c);
  }
};

inline constexpr std::array<double, 6> kGhzSvetlichnyAzimuths = {
    0.0,
    std::numbers::pi / 2,
    0.0,
    -std::numbers::pi / 2,
    3 * std::numbers::pi / 4,
    -3 * std::numbers::pi / 4};

/// GHZ state with equatorial measurements; azimuths ordered A0 A1 B0 B1 C0 C1.
inline std::pair<PureState, SettingsTriple>
ghz_setting(const std::array<double, 6> &azimuths = kGhzSvetlichnyAzimuths) {
  Vector8c v = Vector8c::Zero();
  v[0] = 1.0 / std::numbers::sqrt2;
  v[7] = 1.0 / std::numbers::sqrt2;
  SettingsTriple settings;
  for (int party = 0; party < 3; ++party)
    for (int s = 0; s < 2; ++s)
      settings.parties[static_cast<std::size_t>(party)]
                      [static_cast<std::size_t>(s)] = QubitMeasurement{
          std::numbers::pi / 2,
          azimuths[static_cast<std::size_t>(2 * party + s)]};
  return {PureState(v), settings};
}

/// (1 - p) rho + (p/8) I
inline DensityMatrix mix_white_noise(const DensityMatrix &rho,
                                     const NoiseLevel &noise) {
  const double p = noise.p();
  return DensityMatrix((1.0 - p) * rho.matrix() +
                       (p / 8.0) * Matrix8c::Identity());
}

} // namespace tmde
