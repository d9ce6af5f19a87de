#pragma once

// Inefficient-detector channel. A detector that does not fire is recorded as
// outcome 1, so each party's outcome passes independently through
//   K(0|0) = eta, K(1|0) = 1 - eta, K(1|1) = 1, K(0|1) = 0.

#include <array>
#include <string>

#include "tmde/qcore.hpp"

namespace tmde {

struct EfficiencyTriple {
  double eta_a = 1.0;
  double eta_b = 1.0;
  double eta_c = 1.0;

  EfficiencyTriple() = default;
  EfficiencyTriple(double a, double b, double c) : eta_a(a), eta_b(b), eta_c(c) {
    validate();
  }
  static EfficiencyTriple symmetric(double eta) { return {eta, eta, eta}; }

  double operator[](int party) const {
    return party == 0 ? eta_a : (party == 1 ? eta_b : eta_c);
  }

  void validate() const {
    for (double e : {eta_a, eta_b, eta_c})
      if (!(e >= 0.0 && e <= 1.0))
        throw invalid_value("efficiency " + std::to_string(e) +
                            " outside [0,1]");
  }
};

/// Componentwise product, the efficiency of two channels applied in turn.
inline EfficiencyTriple operator*(const EfficiencyTriple &l,
                                  const EfficiencyTriple &r) {
  return {l.eta_a * r.eta_a, l.eta_b * r.eta_b, l.eta_c * r.eta_c};
}

/// Observed statistics of `ideal` seen through detectors with efficiencies
/// `etas`.
inline BehaviorTensor observe(const BehaviorTensor &ideal,
                              const EfficiencyTriple &etas) {
  etas.validate();
  // kernel[party][observed][ideal]
  double kernel[3][2][2];
  for (int party = 0; party < 3; ++party) {
    const double eta = etas[party];
    kernel[party][0][0] = eta;
    kernel[party][1][0] = 1.0 - eta;
    kernel[party][0][1] = 0.0;
    kernel[party][1][1] = 1.0;
  }
  std::array<double, 64> out{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
              const double p = ideal(a, b, c, x, y, z);
              if (p == 0.0)
                continue;
              for (int ao = 0; ao < 2; ++ao)
                for (int bo = 0; bo < 2; ++bo)
                  for (int co = 0; co < 2; ++co)
                    out[BehaviorTensor::index(ao, bo, co, x, y, z)] +=
                        kernel[0][ao][a] * kernel[1][bo][b] *
                        kernel[2][co][c] * p;
            }
  return BehaviorTensor::from_probabilities(out);
}

} // namespace tmde
