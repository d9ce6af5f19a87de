#pragma once

// Derivative-free simplex descent with dimension-adaptive coefficients
// (Gao & Han) and automatic re-initialization of a collapsed simplex.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace tmde {

struct NelderMeadOptions {
  std::size_t max_iterations = 20000;
  /// Converged when the spread of objective values across the simplex falls
  /// below this.
  double f_tolerance = 1e-12;
  /// Fresh simplices built around the best point after convergence; stop
  /// early once one of them fails to improve by more than f_tolerance.
  int reinitializations = 4;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

namespace detail {

inline NelderMeadResult nelder_mead_pass(const Objective &f,
                                         const std::vector<double> &start,
                                         const std::vector<double> &steps,
                                         std::size_t max_iterations,
                                         double f_tolerance) {
  const std::size_t n = start.size();
  const double dim = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dim;
  const double contract = 0.75 - 1.0 / (2.0 * dim);
  const double shrink = 1.0 - 1.0 / dim;

  NelderMeadResult res;
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i)
    simplex[i + 1][i] += steps[i];
  for (std::size_t i = 0; i <= n; ++i)
    values[i] = f(simplex[i]);
  res.evaluations = n + 1;

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point = [&](double t, std::vector<double> &out) {
    // centroid + t (centroid - worst)
    const auto &worst = simplex[order[n]];
    for (std::size_t j = 0; j < n; ++j)
      out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  for (; res.iterations < max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return values[a] < values[b];
    });
    if (values[order[n]] - values[order[0]] <= f_tolerance)
      break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        centroid[j] += simplex[order[i]][j] / dim;

    const double best = values[order[0]];
    const double second_worst = values[order[n - 1]];
    const double worst = values[order[n]];

    point(reflect, trial);
    const double fr = f(trial);
    ++res.evaluations;
    if (fr < best) {
      point(expand, trial2);
      const double fe = f(trial2);
      ++res.evaluations;
      if (fe < fr) {
        simplex[order[n]] = trial2;
        values[order[n]] = fe;
      } else {
        simplex[order[n]] = trial;
        values[order[n]] = fr;
      }
      continue;
    }
    if (fr < second_worst) {
      simplex[order[n]] = trial;
      values[order[n]] = fr;
      continue;
    }
    // contraction, outside if the reflection helped, inside otherwise
    const bool outside = fr < worst;
    point(outside ? contract : -contract, trial2);
    const double fc = f(trial2);
    ++res.evaluations;
    if (fc < (outside ? fr : worst)) {
      simplex[order[n]] = trial2;
      values[order[n]] = fc;
      continue;
    }
    const auto &anchor = simplex[order[0]];
    for (std::size_t i = 1; i <= n; ++i) {
      auto &v = simplex[order[i]];
      for (std::size_t j = 0; j < n; ++j)
        v[j] = anchor[j] + shrink * (v[j] - anchor[j]);
      values[order[i]] = f(v);
    }
    res.evaluations += n;
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  res.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  res.f = *best_it;
  return res;
}

} // namespace detail

/// Minimizes `f` from `start`; `steps` sets the initial simplex edge along
/// each coordinate. Each re-initialization halves the steps.
inline NelderMeadResult nelder_mead(const Objective &f,
                                    std::vector<double> start,
                                    std::vector<double> steps,
                                    const NelderMeadOptions &opts = {}) {
  NelderMeadResult best = detail::nelder_mead_pass(
      f, start, steps, opts.max_iterations, opts.f_tolerance);
  for (int r = 0; r < opts.reinitializations; ++r) {
    for (auto &s : steps)
      s *= 0.5;
    NelderMeadResult next = detail::nelder_mead_pass(
        f, best.x, steps, opts.max_iterations, opts.f_tolerance);
    next.evaluations += best.evaluations;
    next.iterations += best.iterations;
    const bool improved = next.f < best.f - opts.f_tolerance;
    if (next.f <= best.f)
      best = std::move(next);
    else {
      best.evaluations = next.evaluations;
      best.iterations = next.iterations;
    }
    if (!improved)
      break;
  }
  return best;
}

} // namespace tmde
