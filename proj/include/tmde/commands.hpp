#pragma once

// Implementations of the command-line subcommands. Each returns the process
// exit code: 0 success, 1 verification or violation-expectation failure,
// 2 usage or parse error.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "tmde/detector.hpp"
#include "tmde/inequality.hpp"
#include "tmde/io.hpp"
#include "tmde/polytope.hpp"
#include "tmde/search.hpp"

namespace tmde::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

inline std::string witness_name(Witness w) {
  return w == Witness::svetlichny ? "svetlichny" : "t2";
}

inline std::optional<Witness> parse_witness(const std::string &s) {
  if (s == "svetlichny")
    return Witness::svetlichny;
  if (s == "t2")
    return Witness::t2;
  return std::nullopt;
}

inline void emit(const ResultRecord &r, bool as_json, std::ostream &out) {
  if (as_json)
    out << r.to_json().dump(2) << '\n';
  else
    out << r.to_text();
}

/// Exhaustive maximum of a witness over the extreme points of its local set
/// (deterministic bilocal strategies for Svetlichny, time-ordered extreme
/// points for B_T2). Succeeds only when the maximum equals the bound exactly. `coefficients` exists so tests can
/// feed a corrupted witness.
inline int cmd_bounds_verify(Witness w, std::ostream &out, bool as_json = false,
                             const WitnessCoefficients &coefficients = {}) {
  double max = 0.0;
  std::size_t count = 0;
  double bound = 0.0;
  if (w == Witness::svetlichny) {
    const auto vertices = enumerate_svetlichny_vertices();
    max = classical_max(Expression::svetlichny_corr, vertices, coefficients);
    count = vertices.size();
    bound = kSvetlichnyBound;
  } else {
    const auto vertices = enumerate_t2_extremes();
    max = classical_max(Expression::t2, vertices, coefficients);
    count = vertices.size();
    bound = kT2Bound;
  }
  const bool ok = max == bound;
  ResultRecord r;
  r.command = "bounds verify --inequality " + witness_name(w);
  r.input_digest = digest(r.command);
  r.outputs["max"] = max;
  r.outputs["bound"] = bound;
  r.outputs["vertices"] = static_cast<double>(count);
  r.flags["bound_matches"] = ok;
  if (as_json) {
    emit(r, true, out);
  } else {
    out << "max = " << max << " over " << count << " vertices ("
        << (ok ? "matches" : "DOES NOT match") << " bound " << bound << ")\n";
  }
  return ok ? kOk : kFailed;
}

inline int cmd_evaluate(const SettingsFile &s, std::ostream &out,
                        bool as_json = false) {
  const BehaviorTensor ideal = s.ideal_behavior();
  ResultRecord r;
  r.command = "evaluate";
  r.input_digest = digest(canonical_bytes(s));
  const InequalityValue t2 = t2_value(ideal);
  const InequalityValue sv = svetlichny_corr_value(ideal);
  r.outputs["t2_ideal"] = t2.value;
  r.outputs["svetlichny_ideal"] = sv.value;
  r.flags["t2_violated_ideal"] = t2.violated;
  r.flags["svetlichny_violated_ideal"] = sv.violated;
  if (s.efficiencies) {
    const BehaviorTensor seen = observe(ideal, *s.efficiencies);
    const InequalityValue t2o = t2_value(seen);
    const InequalityValue svo = svetlichny_corr_value(seen);
    r.outputs["t2_observed"] = t2o.value;
    r.outputs["svetlichny_observed"] = svo.value;
    r.flags["t2_violated_observed"] = t2o.violated;
    r.flags["svetlichny_violated_observed"] = svo.violated;
  }
  emit(r, as_json, out);
  return kOk;
}

/// Symmetric cut-off efficiency of the given settings.
inline int cmd_cde(const SettingsFile &s, Witness w, std::ostream &out,
                   std::ostream &err, bool as_json = false) {
  const BehaviorTensor ideal = s.ideal_behavior();
  ResultRecord r;
  r.command = "cde --inequality " + witness_name(w);
  r.input_digest = digest(canonical_bytes(s));
  if (w == Witness::svetlichny) {
    const SvetlichnyCoefficients k = svetlichny_coefficients(ideal);
    r.outputs["alpha"] = k.alpha;
    r.outputs["beta"] = k.beta;
    r.outputs["gamma"] = k.gamma;
    try {
      const double eta = svetlichny_cde(k);
      r.outputs["cde"] = eta;
      if (eta == 0.0)
        r.diagnostics.push_back(
            "violation persists at every positive efficiency");
    } catch (const no_violation &e) {
      err << "error: " << e.what() << '\n';
      return kFailed;
    }
  } else {
    const T2Parts parts = t2_parts(zero_marginals(ideal));
    r.outputs["triple_sum"] = parts.triple_sum;
    r.outputs["pair_sum"] = parts.pair_sum;
    const auto eta = t2_cde_symmetric(parts);
    if (!eta) {
      err << "error: " << no_violation(parts.pair_sum - parts.triple_sum).what()
          << '\n';
      return kFailed;
    }
    r.outputs["cde"] = *eta;
  }
  emit(r, as_json, out);
  return kOk;
}

/// Multi-start MDE search; the best settings are written as an explicit
/// settings file that `cde` can re-verify.
inline int cmd_mde(Witness w, const SearchConfig &cfg,
                   const std::filesystem::path &settings_out, std::ostream &out,
                   std::ostream &err, bool as_json = false) {
  MdeResult res;
  try {
    res = w == Witness::svetlichny ? optimize_svetlichny_mde(cfg)
                                   : optimize_t2_mde_symmetric(cfg);
  } catch (const search_failure &e) {
    err << "error: " << e.what() << '\n';
    return kFailed;
  }
  const SettingsFile best = SettingsFile::from_search(res.best_settings);
  write_atomically(settings_out, to_json(best).dump(2) + "\n");

  ResultRecord r;
  r.command = "mde " + witness_name(w);
  const json config = {{"inequality", witness_name(w)},
                       {"restarts", cfg.restarts},
                       {"seed", cfg.seed},
                       {"max_iterations", cfg.max_iterations},
                       {"convergence_tol", cfg.convergence_tol},
                       {"penalty_weight", cfg.penalty_weight}};
  r.input_digest = digest(config.dump());
  r.outputs["best_eta"] = res.best_eta;
  r.outputs["best_restart"] = res.best_restart;
  r.outputs["restarts"] = cfg.restarts;
  r.diagnostics.push_back("best settings written to " + settings_out.string() +
                          " (digest " + digest(canonical_bytes(best)) + ")");
  emit(r, as_json, out);
  return kOk;
}

inline int cmd_sweep(const LinearGrid &thetas, const LinearGrid &ps,
                     const std::filesystem::path &csv_out, std::ostream &out,
                     bool as_json = false) {
  const auto rows = sweep_t2_noise(thetas.points(), ps.points());
  write_atomically(csv_out, sweep_csv(rows));

  ResultRecord r;
  r.command = "sweep";
  const json config = {{"theta", {thetas.lo, thetas.hi, thetas.n}},
                       {"p", {ps.lo, ps.hi, ps.n}}};
  r.input_digest = digest(config.dump());
  std::optional<double> max_p, min_eta;
  for (const auto &row : rows)
    if (row.eta_min) {
      max_p = max_p ? std::max(*max_p, row.p) : row.p;
      min_eta = min_eta ? std::min(*min_eta, *row.eta_min) : *row.eta_min;
    }
  r.outputs["rows"] = static_cast<double>(rows.size());
  r.outputs["max_feasible_p"] = max_p;
  r.outputs["min_eta"] = min_eta;
  r.diagnostics.push_back("rows written to " + csv_out.string());
  emit(r, as_json, out);
  return kOk;
}

} // namespace tmde::cli
