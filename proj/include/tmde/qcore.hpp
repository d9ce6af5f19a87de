#pragma once

// Three-qubit states, dichotomic qubit measurements and Born-rule behaviors.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tmde {

using complex_t = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix8c = Eigen::Matrix<complex_t, 8, 8>;
using Vector2c = Eigen::Vector2cd;
using Vector8c = Eigen::Matrix<complex_t, 8, 1>;

/// Raised when a value violates the invariants of its type.
class invalid_value : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kNegativeClamp = 1e-12;
inline constexpr double kSliceTolerance = 1e-10;

enum class Party : int { A = 0, B = 1, C = 2 };

/*******************************************************************************
 * PureState
 ******************************************************************************/

/// Normalized amplitude vector over |abc>, index = 4a + 2b + c.
class PureState {
public:
  /// Rejects vectors whose norm deviates from 1 by more than 1e-9, then
  /// renormalizes so the stored amplitudes satisfy the invariant to 1e-12.
  explicit PureState(const Vector8c &amplitudes) : amp_(amplitudes) {
    const double n = amp_.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance)
      throw invalid_value("PureState: amplitudes not normalized (norm = " +
                          std::to_string(n) + ")");
    amp_ /= n;
  }

  /// Builds a state from any nonzero vector by normalizing it.
  static PureState normalized(const Vector8c &v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw invalid_value("PureState: cannot normalize a zero vector");
    return PureState(Vector8c(v / n));
  }

  static PureState basis(std::size_t label) {
    if (label >= 8)
      throw invalid_value("PureState: basis label out of range");
    Vector8c v = Vector8c::Zero();
    v[static_cast<Eigen::Index>(label)] = 1.0;
    return PureState(v);
  }

  const Vector8c &amplitudes() const { return amp_; }
  complex_t operator[](std::size_t label) const {
    return amp_[static_cast<Eigen::Index>(label)];
  }

private:
  Vector8c amp_;
};

/*******************************************************************************
 * DensityMatrix
 ******************************************************************************/

class DensityMatrix {
public:
  /// Validates hermiticity (1e-12), unit trace (1e-12) and positivity
  /// (eigenvalues >= -1e-10).
  explicit DensityMatrix(const Matrix8c &entries) : rho_(entries) {
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= 1e-12))
      throw invalid_value("DensityMatrix: not Hermitian (deviation " +
                          std::to_string(herm) + ")");
    const complex_t tr = rho_.trace();
    if (std::abs(tr - 1.0) > 1e-12)
      throw invalid_value("DensityMatrix: trace != 1");
    // Symmetrize before the eigensolve so round-off cannot leak imaginary
    // parts onto the diagonal.
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix8c> solver(rho_,
                                                   Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10)
      throw invalid_value("DensityMatrix: not positive semidefinite");
  }

  static DensityMatrix maximally_mixed() {
    return DensityMatrix(Matrix8c::Identity() / 8.0);
  }

  const Matrix8c &matrix() const { return rho_; }
  complex_t operator()(std::size_t r, std::size_t c) const {
    return rho_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

private:
  Matrix8c rho_;
};

/// Rank-1 projector onto the state.
inline DensityMatrix density_from_pure(const PureState &state) {
  const Vector8c &v = state.amplitudes();
  if (std::abs(v.norm() - 1.0) > kNormTolerance)
    throw invalid_value("density_from_pure: state not normalized");
  return DensityMatrix(v * v.adjoint());
}

/*******************************************************************************
 * QubitMeasurement
 ******************************************************************************/

/// Projective qubit measurement. Outcome 0 projects onto
///   cos(polar/2)|0> + e^{i azimuth} sin(polar/2)|1>,
/// outcome 1 onto the orthogonal vector
///   sin(polar/2)|0> - e^{i azimuth} cos(polar/2)|1>.
/// Outcome 0 corresponds to eigenvalue +1 of the associated observable.
struct QubitMeasurement {
  double polar = 0.0;
  double azimuth = 0.0;

  Vector2c basis_vector(int outcome) const {
    const double c = std::cos(0.5 * polar);
    const double s = std::sin(0.5 * polar);
    const complex_t phase = std::polar(1.0, azimuth);
    Vector2c v;
    if (outcome == 0)
      v << c, phase * s;
    else
      v << s, -phase * c;
    return v;
  }
};

inline void check_outcome(int outcome) {
  if (outcome != 0 && outcome != 1)
    throw invalid_value("outcome must be 0 or 1");
}

inline Matrix2c projector(const QubitMeasurement &m, int outcome) {
  check_outcome(outcome);
  const Vector2c v = m.basis_vector(outcome);
  return v * v.adjoint();
}

/*******************************************************************************
 * SettingsTriple
 ******************************************************************************/

/// Two measurements (settings 0 and 1) for each of A, B, C.
struct SettingsTriple {
  std::array<std::array<QubitMeasurement, 2>, 3> parties{};

  const QubitMeasurement &at(Party p, int setting) const {
    return parties[static_cast<std::size_t>(p)]
                  [static_cast<std::size_t>(setting)];
  }
  QubitMeasurement &at(Party p, int setting) {
    return parties[static_cast<std::size_t>(p)]
                  [static_cast<std::size_t>(setting)];
  }

  /// Same pair of measurements for every party.
  static SettingsTriple identical(const QubitMeasurement &m0,
                                  const QubitMeasurement &m1) {
    SettingsTriple s;
    for (auto &p : s.parties)
      p = {m0, m1};
    return s;
  }
};

/*******************************************************************************
 * BehaviorTensor
 ******************************************************************************/

/// Conditional distribution P(abc|xyz) with a, b, c, x, y, z in {0,1}.
class BehaviorTensor {
public:
  static constexpr std::size_t index(int a, int b, int c, int x, int y,
                                     int z) {
    return static_cast<std::size_t>((x << 5) | (y << 4) | (z << 3) |
                                    (a << 2) | (b << 1) | c);
  }

  /// Entries in index() order. Entries >= -1e-12 are clamped to 0; anything
  /// more negative, or a slice whose sum deviates from 1 by more than 1e-10,
  /// is rejected.
  static BehaviorTensor from_probabilities(const std::array<double, 64> &p) {
    BehaviorTensor t;
    for (std::size_t i = 0; i < 64; ++i) {
      if (!std::isfinite(p[i]) || p[i] < -kNegativeClamp)
        throw invalid_value("BehaviorTensor: negative or non-finite entry " +
                            std::to_string(p[i]) + " at index " +
                            std::to_string(i));
      t.p_[i] = p[i] < 0.0 ? 0.0 : p[i];
    }
    for (int s = 0; s < 8; ++s) {
      double sum = 0.0;
      for (int o = 0; o < 8; ++o)
        sum += t.p_[static_cast<std::size_t>(s * 8 + o)];
      if (std::abs(sum - 1.0) > kSliceTolerance)
        throw invalid_value("BehaviorTensor: slice " + std::to_string(s) +
                            " sums to " + std::to_string(sum));
    }
    return t;
  }

  /// Every outcome equally likely for every setting.
  static BehaviorTensor uniform() {
    std::array<double, 64> p;
    p.fill(0.125);
    return from_probabilities(p);
  }

  double operator()(int a, int b, int c, int x, int y, int z) const {
    return p_[index(a, b, c, x, y, z)];
  }
  const std::array<double, 64> &data() const { return p_; }

private:
  BehaviorTensor() = default;
  std::array<double, 64> p_{};
};

/// Largest deviation, over all single- and two-party marginals, between the
/// values obtained at the two settings of any party that is summed out.
inline double no_signaling_deviation(const BehaviorTensor &t) {
  double worst = 0.0;
  // Two-party marginals: sum over the third party, compare its settings.
  for (int third = 0; third < 3; ++third) {
    for (int o1 = 0; o1 < 2; ++o1)
      for (int o2 = 0; o2 < 2; ++o2)
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2) {
            double m[2] = {0.0, 0.0};
            for (int st = 0; st < 2; ++st)
              for (int ot = 0; ot < 2; ++ot) {
                int out[3], set[3];
                int k = 0;
                for (int party = 0; party < 3; ++party) {
                  if (party == third) {
                    out[party] = ot;
                    set[party] = st;
                  } else {
                    out[party] = k == 0 ? o1 : o2;
                    set[party] = k == 0 ? s1 : s2;
                    ++k;
                  }
                }
                m[st] += t(out[0], out[1], out[2], set[0], set[1], set[2]);
              }
            worst = std::max(worst, std::abs(m[0] - m[1]));
          }
  }
  // Single-party marginals: sum over both others, compare all four of their
  // setting pairs.
  for (int party = 0; party < 3; ++party)
    for (int o = 0; o < 2; ++o)
      for (int s = 0; s < 2; ++s) {
        double lo = 2.0, hi = -1.0;
        for (int r = 0; r < 4; ++r) {
          double sum = 0.0;
          for (int rest = 0; rest < 4; ++rest) {
            int out[3], set[3];
            int k = 0;
            for (int q = 0; q < 3; ++q) {
              if (q == party) {
                out[q] = o;
                set[q] = s;
              } else {
                out[q] = (rest >> k) & 1;
                set[q] = (r >> k) & 1;
                ++k;
              }
            }
            sum += t(out[0], out[1], out[2], set[0], set[1], set[2]);
          }
          lo = std::min(lo, sum);
          hi = std::max(hi, sum);
        }
        worst = std::max(worst, hi - lo);
      }
  return worst;
}

/*******************************************************************************
 * Born rule
 ******************************************************************************/

/// P(abc|xyz) = Tr[rho (Pi_a^{A_x} (x) Pi_b^{B_y} (x) Pi_c^{C_z})].
inline BehaviorTensor behavior_from_settings(const DensityMatrix &rho,
                                             const SettingsTriple &settings) {
  std::array<double, 64> p{};
  const Matrix8c &r = rho.matrix();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
              const Matrix2c pa = projector(settings.at(Party::A, x), a);
              const Matrix2c pb = projector(settings.at(Party::B, y), b);
              const Matrix2c pc = projector(settings.at(Party::C, z), c);
              // Tr[rho (pa (x) pb (x) pc)] without materializing the product.
              complex_t acc = 0.0;
              for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                  const complex_t op = pa(j >> 2, i >> 2) *
                                       pb((j >> 1) & 1, (i >> 1) & 1) *
                                       pc(j & 1, i & 1);
                  acc += r(i, j) * op;
                }
              p[BehaviorTensor::index(a, b, c, x, y, z)] = acc.real();
            }
  return BehaviorTensor::from_probabilities(p);
}

/// Pure-state fast path: P(abc|xyz) = |<u_a (x) v_b (x) w_c | psi>|^2.
inline BehaviorTensor behavior_from_state(const PureState &psi,
                                          const SettingsTriple &settings) {
  std::array<double, 64> p{};
  std::array<std::array<std::array<Vector2c, 2>, 2>, 3> vec;
  for (int party = 0; party < 3; ++party)
    for (int s = 0; s < 2; ++s)
      for (int o = 0; o < 2; ++o)
        vec[party][s][o] =
            settings.parties[party][s].basis_vector(o);
  const Vector8c &amp = psi.amplitudes();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
              const Vector2c &u = vec[0][x][a];
              const Vector2c &v = vec[1][y][b];
              const Vector2c &w = vec[2][z][c];
              complex_t overlap = 0.0;
              for (int i = 0; i < 8; ++i)
                overlap += std::conj(u[i >> 2] * v[(i >> 1) & 1] * w[i & 1]) *
                           amp[i];
              p[BehaviorTensor::index(a, b, c, x, y, z)] = std::norm(overlap);
            }
  return BehaviorTensor::from_probabilities(p);
}

} // namespace tmde
