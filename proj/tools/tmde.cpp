// tmde: detection-efficiency thresholds for tripartite genuine nonlocality.
//
//   tmde bounds verify --inequality {t2,svetlichny}
//   tmde evaluate (--settings FILE | --theta RAD [--p P] [--eta A,B,C])
//   tmde cde --inequality {t2,svetlichny} (--settings FILE | --theta RAD [--p P])
//   tmde mde {t2,svetlichny} [--restarts N] [--seed S] [--out FILE]
//   tmde sweep [--theta-grid LO:HI:N] [--p-grid LO:HI:N] --out FILE

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tmde/commands.hpp"

using namespace tmde;
using namespace tmde::cli;

namespace {

struct SettingsFlags {
  std::string path;
  std::optional<double> theta;
  std::optional<double> p;
  std::string eta;

  void add_to(CLI::App *cmd) {
    cmd->add_option("--settings", path, "settings JSON file");
    cmd->add_option("--theta", theta, "theta family parameter (radians)");
    cmd->add_option("--p", p, "white-noise weight in [0,1]");
    cmd->add_option("--eta", eta, "detector efficiencies a,b,c");
  }

  SettingsFile resolve() const {
    if (path.empty() == !theta.has_value())
      throw settings_error("give exactly one of --settings and --theta");
    SettingsFile s = path.empty()
                         ? SettingsFile{FamilySpec{"theta", *theta, {}},
                                        std::nullopt, std::nullopt}
                         : load_settings(path);
    if (p) {
      (void)NoiseLevel(*p);
      s.noise_p = p;
    }
    if (!eta.empty()) {
      std::array<double, 3> e{};
      std::stringstream ss(eta);
      std::string item;
      std::size_t i = 0;
      while (std::getline(ss, item, ',')) {
        if (i == 3)
          throw settings_error("--eta: expected three comma-separated values");
        std::size_t used = 0;
        e[i] = std::stod(item, &used);
        if (used != item.size())
          throw settings_error("--eta: bad number '" + item + "'");
        ++i;
      }
      if (i != 3)
        throw settings_error("--eta: expected three comma-separated values");
      s.efficiencies = EfficiencyTriple(e[0], e[1], e[2]);
    }
    if (std::holds_alternative<FamilySpec>(s.source) &&
        std::get<FamilySpec>(s.source).name == "theta")
      (void)ThetaSetting(std::get<FamilySpec>(s.source).theta);
    return s;
  }
};

Witness require_witness(const std::string &name) {
  if (auto w = parse_witness(name))
    return *w;
  throw settings_error("--inequality must be t2 or svetlichny, got '" + name +
                       "'");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Detection-efficiency thresholds for tripartite genuine "
               "nonlocality"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "print the result record as JSON");

  auto *bounds = app.add_subcommand("bounds", "classical bound checks");
  bounds->require_subcommand(1);
  auto *verify = bounds->add_subcommand(
      "verify", "maximize a witness over all deterministic strategies");
  std::string verify_ineq;
  bool corrupt = false;
  verify->add_option("--inequality", verify_ineq)->required();
  verify->add_flag("--corrupt", corrupt)->group("");

  auto *evaluate =
      app.add_subcommand("evaluate", "witness values of a quantum setting");
  SettingsFlags eval_flags;
  eval_flags.add_to(evaluate);

  auto *cde = app.add_subcommand("cde", "symmetric cut-off efficiency");
  SettingsFlags cde_flags;
  std::string cde_ineq;
  cde_flags.add_to(cde);
  cde->add_option("--inequality", cde_ineq)->required();

  auto *mde = app.add_subcommand("mde", "minimum detection efficiency search");
  std::string mde_ineq;
  std::string mde_out;
  SearchConfig cfg;
  mde->add_option("inequality,--inequality", mde_ineq, "t2 or svetlichny")
      ->required();
  mde->add_option("--restarts", cfg.restarts);
  mde->add_option("--seed", cfg.seed);
  mde->add_option("--max-iterations", cfg.max_iterations);
  mde->add_option("--out", mde_out, "best settings JSON");

  auto *sweep = app.add_subcommand("sweep", "noisy theta-family B_T2 sweep");
  std::string theta_grid, p_grid, sweep_out;
  sweep->add_option("--theta-grid", theta_grid, "lo:hi:n (radians)");
  sweep->add_option("--p-grid", p_grid, "lo:hi:n");
  sweep->add_option("--out", sweep_out, "CSV output")->required();

  for (auto *cmd : {evaluate, cde, mde, sweep, verify})
    cmd->add_flag("--json", as_json, "print the result record as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    (void)app.exit(e);
    return kUsage;
  }

  try {
    if (verify->parsed()) {
      WitnessCoefficients k;
      if (corrupt) {
        k.svetlichny[2] = -k.svetlichny[2];
        k.t2.triple[3] += 1;
      }
      return cmd_bounds_verify(require_witness(verify_ineq), std::cout,
                               as_json, k);
    }
    if (evaluate->parsed())
      return cmd_evaluate(eval_flags.resolve(), std::cout, as_json);
    if (cde->parsed())
      return cmd_cde(cde_flags.resolve(), require_witness(cde_ineq), std::cout,
                     std::cerr, as_json);
    if (mde->parsed()) {
      const Witness w = require_witness(mde_ineq);
      cfg.validate();
      if (mde_out.empty())
        mde_out = "mde_" + witness_name(w) + "_best.json";
      return cmd_mde(w, cfg, mde_out, std::cout, std::cerr, as_json);
    }
    if (sweep->parsed()) {
      const LinearGrid tg =
          theta_grid.empty() ? kDefaultThetaGrid : parse_grid(theta_grid);
      const LinearGrid pg = p_grid.empty() ? kDefaultNoiseGrid : parse_grid(p_grid);
      return cmd_sweep(tg, pg, sweep_out, std::cout, as_json);
    }
  } catch (const settings_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const marginal_inconsistency &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
