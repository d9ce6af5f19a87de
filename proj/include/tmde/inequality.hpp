#pragma once

// Genuine-nonlocality witnesses on behavior tensors and the cut-off detection
// efficiencies that follow from them.
//
// Two expressions are handled:
//  * B_T2, the time-ordered bilocal witness, written over probabilities of the
//    outcome 0 (classical bound 0);
//  * the Svetlichny expression, written over three-party correlators with the
//    outcome map 0 -> +1, 1 -> -1 (classical bound 4).

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "tmde/detector.hpp"
#include "tmde/qcore.hpp"

namespace tmde {

inline constexpr double kViolationTolerance = 1e-9;
inline constexpr double kMarginalTolerance = 1e-8;
inline constexpr double kT2Bound = 0.0;
inline constexpr double kSvetlichnyBound = 4.0;

class marginal_inconsistency : public std::runtime_error {
public:
  explicit marginal_inconsistency(double deviation)
      : std::runtime_error("marginal inconsistency: no-signaling violated by " +
                           std::to_string(deviation)),
        deviation_(deviation) {}
  double deviation() const { return deviation_; }

private:
  double deviation_;
};

/// The settings do not violate the inequality at unit efficiency.
class no_violation : public std::runtime_error {
public:
  explicit no_violation(double deficit)
      : std::runtime_error("no violation at unit efficiency (deficit " +
                           std::to_string(deficit) + ")"),
        deficit_(deficit) {}
  double deficit() const { return deficit_; }

private:
  double deficit_;
};

class degenerate_coefficients : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct InequalityValue {
  double value = 0.0;
  double bound = 0.0;
  bool violated = false;

  static InequalityValue make(double value, double bound) {
    return {value, bound, value > bound + kViolationTolerance};
  }
};

/*******************************************************************************
 * Marginals of the outcome 0
 ******************************************************************************/

/// How setting-free marginals are read off a tensor.
enum class MarginalReading {
  /// Sum at setting 0 of the summed-out parties and require agreement with
  /// every other setting within 1e-8.
  no_signaling,
  /// Take the largest value over the summed-out parties' settings. Used for
  /// deterministic signaling strategies, where no setting-free marginal exists.
  max_over_settings,
};

enum PairIndex : int { kAB = 0, kBC = 1, kAC = 2 };

struct ZeroMarginals {
  /// single[party][setting] = P(0|X_s)
  std::array<std::array<double, 2>, 3> single{};
  /// pair[kAB][x][y] = P(00|A_x B_y), pair[kBC][y][z], pair[kAC][x][z]
  std::array<std::array<std::array<double, 2>, 2>, 3> pair{};
  /// triple[x][y][z] = P(000|A_x B_y C_z)
  std::array<std::array<std::array<double, 2>, 2>, 2> triple{};
};

namespace detail {

// Members of each pair and the party summed out, in PairIndex order.
inline constexpr int kPairFirst[3] = {0, 1, 0};
inline constexpr int kPairSecond[3] = {1, 2, 2};
inline constexpr int kPairThird[3] = {2, 0, 1};

inline double pair_zero(const BehaviorTensor &t, int pair, int s1, int s2,
                        int s3) {
  double sum = 0.0;
  for (int o3 = 0; o3 < 2; ++o3) {
    int out[3], set[3];
    out[kPairFirst[pair]] = 0;
    out[kPairSecond[pair]] = 0;
    out[kPairThird[pair]] = o3;
    set[kPairFirst[pair]] = s1;
    set[kPairSecond[pair]] = s2;
    set[kPairThird[pair]] = s3;
    sum += t(out[0], out[1], out[2], set[0], set[1], set[2]);
  }
  return sum;
}

// rest encodes the settings of the two other parties in increasing party order
inline double single_zero(const BehaviorTensor &t, int party, int s, int rest) {
  double sum = 0.0;
  for (int o = 0; o < 4; ++o) {
    int out[3], set[3];
    int k = 0;
    for (int q = 0; q < 3; ++q) {
      if (q == party) {
        out[q] = 0;
        set[q] = s;
      } else {
        out[q] = (o >> k) & 1;
        set[q] = (rest >> k) & 1;
        ++k;
      }
    }
    sum += t(out[0], out[1], out[2], set[0], set[1], set[2]);
  }
  return sum;
}

} // namespace detail

inline ZeroMarginals zero_marginals(
    const BehaviorTensor &t,
    MarginalReading reading = MarginalReading::no_signaling) {
  ZeroMarginals m;
  double worst = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        m.triple[x][y][z] = t(0, 0, 0, x, y, z);

  for (int pair = 0; pair < 3; ++pair)
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2) {
        const double at0 = detail::pair_zero(t, pair, s1, s2, 0);
        const double at1 = detail::pair_zero(t, pair, s1, s2, 1);
        worst = std::max(worst, std::abs(at0 - at1));
        m.pair[pair][s1][s2] =
            reading == MarginalReading::no_signaling ? at0 : std::max(at0, at1);
      }

  for (int party = 0; party < 3; ++party)
    for (int s = 0; s < 2; ++s) {
      const double base = detail::single_zero(t, party, s, 0);
      double hi = base;
      for (int rest = 1; rest < 4; ++rest) {
        const double v = detail::single_zero(t, party, s, rest);
        worst = std::max(worst, std::abs(v - base));
        hi = std::max(hi, v);
      }
      m.single[party][s] =
          reading == MarginalReading::no_signaling ? base : hi;
    }

  if (reading == MarginalReading::no_signaling && worst > kMarginalTolerance)
    throw marginal_inconsistency(worst);
  return m;
}

/*******************************************************************************
 * B_T2
 ******************************************************************************/

/// Integer coefficients of B_T2. `pair` multiplies each of P(00|A1B1),
/// P(00|B1C1), P(00|A1C1); triple[4x + 2y + z] multiplies P(000|A_x B_y C_z).
struct T2Coefficients {
  int pair = -2;
  std::array<int, 8> triple = {0, -1, -1, 2, -1, 2, 2, 2};
};

/// B_T2 = T - Q with T the signed triple combination and Q the (positive)
/// pair-marginal penalty. Under symmetric efficiency eta the observed value
/// is eta^3 T - eta^2 Q.
struct T2Parts {
  double triple_sum = 0.0;
  double pair_sum = 0.0;
  double value() const { return triple_sum - pair_sum; }
};

inline T2Parts t2_parts(const ZeroMarginals &m,
                        const T2Coefficients &coeffs = {}) {
  T2Parts parts;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        parts.triple_sum += coeffs.triple[static_cast<std::size_t>(
                                4 * x + 2 * y + z)] *
                            m.triple[x][y][z];
  parts.pair_sum = -coeffs.pair * (m.pair[kAB][1][1] + m.pair[kBC][1][1] +
                                   m.pair[kAC][1][1]);
  return parts;
}

inline InequalityValue t2_value(const BehaviorTensor &t) {
  return InequalityValue::make(t2_parts(zero_marginals(t)).value(), kT2Bound);
}

/*******************************************************************************
 * Svetlichny
 ******************************************************************************/

/// Sign of <A_x B_y C_z>, indexed 4x + 2y + z. Positive only at (0,1,0) and
/// (1,0,1).
using SvetlichnySigns = std::array<int, 8>;
inline constexpr SvetlichnySigns kSvetlichnySigns = {-1, -1, 1, -1,
                                                     -1, 1, -1, -1};

inline double correlator(const BehaviorTensor &t, int x, int y, int z) {
  double e = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        e += ((a + b + c) % 2 == 0 ? 1.0 : -1.0) * t(a, b, c, x, y, z);
  return e;
}

inline double svetlichny_expression(const BehaviorTensor &t,
                                    const SvetlichnySigns &signs) {
  double s = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        s += signs[static_cast<std::size_t>(4 * x + 2 * y + z)] *
             correlator(t, x, y, z);
  return s;
}

inline InequalityValue svetlichny_corr_value(const BehaviorTensor &t) {
  return InequalityValue::make(svetlichny_expression(t, kSvetlichnySigns),
                               kSvetlichnyBound);
}

/// Svetlichny expression rewritten over outcome-0 probabilities. With
///   alpha = 2 sum_{xyz} sign(x,y,z) m_xyz,
///   beta  = 2 [q00 + q11 + r00 + r11 + s01 + s10],
///   gamma = a0 + a1 + b0 + b1 + c0 + c1,
/// where m, q = P(00|A B), r = P(00|B C), s = P(00|A C) and a, b, c are the
/// single marginals, every no-signaling tensor satisfies
///   S - 4 = 4 (alpha + beta - gamma).
/// Under symmetric efficiency eta the three groups scale as eta^3, eta^2 and
/// eta, so the observed excess is 4 eta (alpha eta^2 + beta eta - gamma).
///
/// The pair terms are those produced by expanding each correlator as
/// 8m - 4(q + r + s) + 2(a + b + c) - 1 and collecting signs: the BC pair
/// enters at equal settings and the AC pair at opposite settings. Each sum
/// runs only over the indices its own term carries. Summing every term over
/// all three setting indices instead would double the pair terms and
/// quadruple the single terms without changing alpha, which breaks the
/// identity above.
struct SvetlichnyCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  /// Positive exactly when the settings violate at unit efficiency.
  double excess() const { return alpha + beta - gamma; }
};

inline SvetlichnyCoefficients svetlichny_coefficients(const ZeroMarginals &m) {
  SvetlichnyCoefficients k;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        k.alpha += 2.0 * kSvetlichnySigns[static_cast<std::size_t>(
                             4 * x + 2 * y + z)] *
                   m.triple[x][y][z];
  k.beta = 2.0 * (m.pair[kAB][0][0] + m.pair[kAB][1][1] + m.pair[kBC][0][0] +
                  m.pair[kBC][1][1] + m.pair[kAC][0][1] + m.pair[kAC][1][0]);
  for (int party = 0; party < 3; ++party)
    k.gamma += m.single[party][0] + m.single[party][1];
  return k;
}

inline SvetlichnyCoefficients svetlichny_coefficients(const BehaviorTensor &t) {
  return svetlichny_coefficients(zero_marginals(t));
}

/// Symmetric cut-off efficiency: the root of alpha eta^2 + beta eta - gamma
/// where violation starts. For alpha > 0 this is the unique positive root;
/// for alpha < 0 the quadratic is concave and the smaller root is the
/// crossing. Both cases, and the linear case alpha = 0, are the same
/// expression written as 2 gamma / (beta + sqrt(beta^2 + 4 alpha gamma)).
/// Returns 0 when gamma vanishes (violation persists at every eta > 0).
inline double svetlichny_cde(const SvetlichnyCoefficients &k) {
  if (std::abs(k.alpha) < 1e-12 && std::abs(k.beta) < 1e-12)
    throw degenerate_coefficients(
        "svetlichny_cde: alpha and beta both vanish");
  if (!(k.excess() > 0.0))
    throw no_violation(-k.excess());
  if (k.gamma <= 0.0)
    return 0.0;
  const double disc = k.beta * k.beta + 4.0 * k.alpha * k.gamma;
  // excess > 0 guarantees a real crossing in (0, 1]
  return 2.0 * k.gamma / (k.beta + std::sqrt(std::max(disc, 0.0)));
}

/*******************************************************************************
 * Efficiency conditions for B_T2
 ******************************************************************************/

inline double lemma1_expression(const EfficiencyTriple &e) {
  return 4.0 * e.eta_a * e.eta_b * e.eta_c - e.eta_a * e.eta_b -
         e.eta_a * e.eta_c - e.eta_b * e.eta_c;
}

/// Necessary (and, with the theta family, sufficient) efficiency condition
/// for a B_T2 violation.
inline bool lemma1_predicate(const EfficiencyTriple &e) {
  e.validate();
  return lemma1_expression(e) > 0.0;
}

/// Third efficiency on the critical surface
///   4 ea eb ec = ea eb + ea ec + eb ec,
/// or nullopt when no efficiency in [0,1] reaches it.
inline std::optional<double> theorem1_third_eta(double eta_a, double eta_b) {
  if (!(eta_a > 0.0 && eta_a <= 1.0 && eta_b > 0.0 && eta_b <= 1.0))
    throw invalid_value("theorem1_third_eta: efficiencies must lie in (0,1]");
  const double denom = 4.0 * eta_a * eta_b - eta_a - eta_b;
  if (denom <= 0.0)
    return std::nullopt;
  const double eta_c = eta_a * eta_b / denom;
  if (eta_c > 1.0)
    return std::nullopt;
  return eta_c;
}

class no_theta_range : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Upper bound on tan^2(theta/2) below which the theta family violates B_T2
/// at the given efficiencies.
inline double lemma2_theta_threshold(const EfficiencyTriple &e) {
  if (!lemma1_predicate(e))
    throw no_theta_range("lemma2_theta_threshold: efficiencies admit no "
                         "violating theta");
  const double pairs =
      e.eta_a * e.eta_b + e.eta_b * e.eta_c + e.eta_a * e.eta_c;
  return lemma1_expression(e) / pairs;
}

/// Symmetric cut-off efficiency Q/T of an ideal tensor for B_T2, or nullopt
/// when no eta <= 1 gives a violation.
inline std::optional<double> t2_cde_symmetric(const T2Parts &parts) {
  if (!(parts.triple_sum > 0.0))
    return std::nullopt;
  const double eta = parts.pair_sum / parts.triple_sum;
  if (eta > 1.0 + kViolationTolerance)
    return std::nullopt;
  return eta;
}

inline std::optional<double> t2_cde_symmetric(const BehaviorTensor &ideal) {
  return t2_cde_symmetric(t2_parts(zero_marginals(ideal)));
}

} // namespace tmde
