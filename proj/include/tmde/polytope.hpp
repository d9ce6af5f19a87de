#pragma once

// Extreme strategies of the bilocal (Svetlichny) and time-ordered bilocal
// (T2) models, and exhaustive maximization of the two witnesses over them.
//
// A T2 pair term must admit a one-way model in either time order. Such a
// term cannot signal at all, so the extreme points of the T2 set combine a
// no-signaling two-party box (deterministic or PR-type) with a deterministic
// isolated party. The one-way deterministic strategies (T2Vertex) are kept
// as well: they span a larger set, on which B_T2 is not bounded by 0 once
// strategies with different signaling directions are mixed.

#include <algorithm>
#include <array>
#include <limits>
#include <variant>
#include <vector>

#include "tmde/inequality.hpp"
#include "tmde/qcore.hpp"

namespace tmde {

/// Bipartition: the grouped pair, then the isolated party.
enum class Partition { AB_C, AC_B, BC_A };

inline constexpr std::array<Partition, 3> kPartitions = {
    Partition::AB_C, Partition::AC_B, Partition::BC_A};

struct PartitionMembers {
  int first;
  int second;
  int solo;
};

inline constexpr PartitionMembers members(Partition p) {
  switch (p) {
  case Partition::AB_C:
    return {0, 1, 2};
  case Partition::AC_B:
    return {0, 2, 1};
  case Partition::BC_A:
    return {1, 2, 0};
  }
  return {0, 1, 2};
}

/// Grouped parties may share their settings in both directions.
struct SvetlichnyVertex {
  Partition partition = Partition::AB_C;
  /// pair_outputs[2 s_first + s_second] = {o_first, o_second}
  std::array<std::array<int, 2>, 4> pair_outputs{};
  std::array<int, 2> solo_outputs{};
};

/// Grouped parties are time-ordered: the party in the causal past answers
/// from its own setting only, the future party also sees the past setting.
struct T2Vertex {
  Partition partition = Partition::AB_C;
  /// false: the first grouped party is in the past; true: the second.
  bool second_is_past = false;
  std::array<int, 2> past_outputs{};
  /// future_outputs[2 s_future + s_past]
  std::array<int, 4> future_outputs{};
  std::array<int, 2> solo_outputs{};

  int past_party() const {
    const auto m = members(partition);
    return second_is_past ? m.second : m.first;
  }
  int future_party() const {
    const auto m = members(partition);
    return second_is_past ? m.first : m.second;
  }
};

inline std::vector<SvetlichnyVertex> enumerate_svetlichny_vertices() {
  std::vector<SvetlichnyVertex> out;
  out.reserve(3 * 256 * 4);
  for (Partition p : kPartitions)
    for (int pair_bits = 0; pair_bits < 256; ++pair_bits)
      for (int solo_bits = 0; solo_bits < 4; ++solo_bits) {
        SvetlichnyVertex v;
        v.partition = p;
        for (int s = 0; s < 4; ++s) {
          const int o = (pair_bits >> (2 * s)) & 3;
          v.pair_outputs[static_cast<std::size_t>(s)] = {(o >> 1) & 1, o & 1};
        }
        v.solo_outputs = {solo_bits & 1, (solo_bits >> 1) & 1};
        out.push_back(v);
      }
  return out;
}

inline std::vector<T2Vertex> enumerate_t2_vertices() {
  std::vector<T2Vertex> out;
  out.reserve(3 * 2 * 4 * 16 * 4);
  for (Partition p : kPartitions)
    for (bool second_is_past : {false, true})
      for (int past_bits = 0; past_bits < 4; ++past_bits)
        for (int future_bits = 0; future_bits < 16; ++future_bits)
          for (int solo_bits = 0; solo_bits < 4; ++solo_bits) {
            T2Vertex v;
            v.partition = p;
            v.second_is_past = second_is_past;
            v.past_outputs = {past_bits & 1, (past_bits >> 1) & 1};
            for (int s = 0; s < 4; ++s)
              v.future_outputs[static_cast<std::size_t>(s)] =
                  (future_bits >> s) & 1;
            v.solo_outputs = {solo_bits & 1, (solo_bits >> 1) & 1};
            out.push_back(v);
          }
  return out;
}

namespace detail {

template <class Response>
BehaviorTensor deterministic_behavior(Response response) {
  std::array<double, 64> p{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) {
        const std::array<int, 3> o = response(std::array<int, 3>{x, y, z});
        p[BehaviorTensor::index(o[0], o[1], o[2], x, y, z)] = 1.0;
      }
  return BehaviorTensor::from_probabilities(p);
}

} // namespace detail

inline BehaviorTensor vertex_to_behavior(const SvetlichnyVertex &v) {
  const auto m = members(v.partition);
  return detail::deterministic_behavior([&](const std::array<int, 3> &s) {
    std::array<int, 3> o{};
    const auto &pair = v.pair_outputs[static_cast<std::size_t>(
        2 * s[static_cast<std::size_t>(m.first)] +
        s[static_cast<std::size_t>(m.second)])];
    o[static_cast<std::size_t>(m.first)] = pair[0];
    o[static_cast<std::size_t>(m.second)] = pair[1];
    o[static_cast<std::size_t>(m.solo)] =
        v.solo_outputs[static_cast<std::size_t>(s[static_cast<std::size_t>(m.solo)])];
    return o;
  });
}

inline BehaviorTensor vertex_to_behavior(const T2Vertex &v) {
  const auto past = static_cast<std::size_t>(v.past_party());
  const auto future = static_cast<std::size_t>(v.future_party());
  const auto solo = static_cast<std::size_t>(members(v.partition).solo);
  return detail::deterministic_behavior([&](const std::array<int, 3> &s) {
    std::array<int, 3> o{};
    o[past] = v.past_outputs[static_cast<std::size_t>(s[past])];
    o[future] =
        v.future_outputs[static_cast<std::size_t>(2 * s[future] + s[past])];
    o[solo] = v.solo_outputs[static_cast<std::size_t>(s[solo])];
    return o;
  });
}

/// Extreme point of the no-signaling two-party box polytope. Deterministic:
/// outputs local_first[s1], local_second[s2]. PR-type: uniform outputs with
/// o1 + o2 = s1 s2 + alpha s1 + beta s2 + gamma (mod 2).
struct PairBox {
  bool nonlocal = false;
  std::array<int, 2> local_first{};
  std::array<int, 2> local_second{};
  int alpha = 0, beta = 0, gamma = 0;

  double probability(int o1, int o2, int s1, int s2) const {
    if (!nonlocal)
      return o1 == local_first[static_cast<std::size_t>(s1)] &&
                     o2 == local_second[static_cast<std::size_t>(s2)]
                 ? 1.0
                 : 0.0;
    const int parity = (s1 * s2 + alpha * s1 + beta * s2 + gamma) & 1;
    return ((o1 ^ o2) == parity) ? 0.5 : 0.0;
  }
};

struct T2Extreme {
  Partition partition = Partition::AB_C;
  PairBox pair;
  std::array<int, 2> solo_outputs{};
};

/// 16 deterministic and 8 PR-type boxes per pair, times 4 isolated
/// strategies, for each partition.
inline std::vector<T2Extreme> enumerate_t2_extremes() {
  std::vector<PairBox> boxes;
  for (int bits = 0; bits < 16; ++bits) {
    PairBox b;
    b.local_first = {bits & 1, (bits >> 1) & 1};
    b.local_second = {(bits >> 2) & 1, (bits >> 3) & 1};
    boxes.push_back(b);
  }
  for (int bits = 0; bits < 8; ++bits) {
    PairBox b;
    b.nonlocal = true;
    b.alpha = bits & 1;
    b.beta = (bits >> 1) & 1;
    b.gamma = (bits >> 2) & 1;
    boxes.push_back(b);
  }
  std::vector<T2Extreme> out;
  out.reserve(3 * boxes.size() * 4);
  for (Partition p : kPartitions)
    for (const PairBox &b : boxes)
      for (int solo_bits = 0; solo_bits < 4; ++solo_bits)
        out.push_back({p, b, {solo_bits & 1, (solo_bits >> 1) & 1}});
  return out;
}

inline BehaviorTensor vertex_to_behavior(const T2Extreme &v) {
  const auto m = members(v.partition);
  std::array<double, 64> p{};
  for (int s = 0; s < 8; ++s)
    for (int o = 0; o < 8; ++o) {
      const int set[3] = {s >> 2, (s >> 1) & 1, s & 1};
      const int out[3] = {o >> 2, (o >> 1) & 1, o & 1};
      const double solo =
          out[m.solo] == v.solo_outputs[static_cast<std::size_t>(set[m.solo])]
              ? 1.0
              : 0.0;
      p[BehaviorTensor::index(out[0], out[1], out[2], set[0], set[1], set[2])] =
          solo * v.pair.probability(out[m.first], out[m.second],
                                    set[m.first], set[m.second]);
    }
  return BehaviorTensor::from_probabilities(p);
}

/*******************************************************************************
 * Classical maxima
 ******************************************************************************/

enum class Expression { svetlichny_corr, t2 };

/// Coefficients of both witnesses; the defaults are the genuine expressions.
struct WitnessCoefficients {
  SvetlichnySigns svetlichny = kSvetlichnySigns;
  T2Coefficients t2{};
};

/// Value of a witness on a strategy.
///
/// On a one-way signaling strategy the pair marginals of B_T2 depend on the
/// setting of the party summed out (e.g. P(00|B1C1) depends on x when A
/// signals to B). They are read as the maximum over that setting, which
/// keeps every single one-way strategy at or below 0; a fixed setting admits
/// strategies reaching 1 or 2. The reading is not linear, so mixtures are
/// not covered. On no-signaling input every reading agrees.
inline double witness_value(Expression e, const BehaviorTensor &t,
                            const WitnessCoefficients &k = {}) {
  switch (e) {
  case Expression::svetlichny_corr:
    return svetlichny_expression(t, k.svetlichny);
  case Expression::t2:
    return t2_parts(zero_marginals(t, MarginalReading::max_over_settings), k.t2)
        .value();
  }
  return 0.0;
}

/// Maximum of the witness over the given strategies. All values are integers
/// or halves, exact in double precision.
template <class Vertex>
double classical_max(Expression e, const std::vector<Vertex> &vertices,
                     const WitnessCoefficients &k = {}) {
  if (vertices.empty())
    throw invalid_value("classical_max: empty vertex list");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto &v : vertices)
    best = std::max(best, witness_value(e, vertex_to_behavior(v), k));
  return best;
}

} // namespace tmde
