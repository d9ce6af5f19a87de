#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "tmde/commands.hpp"

using namespace tmde;
using namespace tmde::cli;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

SettingsFile theta(double t, std::optional<double> p = std::nullopt) {
  return {FamilySpec{"theta", t, {}}, p, std::nullopt};
}

json run_json(const std::function<int(std::ostream &, std::ostream &)> &cmd, int expect) {
  std::ostringstream out, err;
  REQUIRE(cmd(out, err) == expect);
  return expect == kOk ? json::parse(out.str()) : json(err.str());
}

} // namespace

TEST_CASE("bounds verify") {
  std::ostringstream out;
  CHECK(cmd_bounds_verify(Witness::svetlichny, out) == kOk);
  CHECK(out.str() == "max = 4 over 3072 vertices (matches bound 4)\n");
  out.str("");
  CHECK(cmd_bounds_verify(Witness::t2, out) == kOk);
  CHECK(out.str() == "max = 0 over 288 vertices (matches bound 0)\n");

  WitnessCoefficients bad;
  bad.t2.triple[3] += 1;
  CHECK(cmd_bounds_verify(Witness::t2, out, false, bad) == kFailed);
  bad.svetlichny[2] = -bad.svetlichny[2];
  CHECK(cmd_bounds_verify(Witness::svetlichny, out, false, bad) == kFailed);
}

TEST_CASE("evaluate flags violations") {
  const auto j = run_json([](auto &o, auto &) { return cmd_evaluate(theta(0.3), o, true); }, kOk);
  CHECK(j["flags"]["t2_violated_ideal"] == true);
  CHECK(j["outputs"]["t2_ideal"].get<double>() > 0);

  SettingsFile wide = theta(1.2);
  wide.efficiencies = EfficiencyTriple(0.9, 1.0, 0.8);
  const auto k = run_json([&](auto &o, auto &) { return cmd_evaluate(wide, o, true); }, kOk);
  CHECK(k["flags"]["t2_violated_ideal"] == false);
  CHECK(k["flags"]["t2_violated_observed"] == false);

  const SettingsFile ghz{FamilySpec{"ghz", 0, kGhzSvetlichnyAzimuths}, std::nullopt, std::nullopt};
  const auto g = run_json([&](auto &o, auto &) { return cmd_evaluate(ghz, o, true); }, kOk);
  CHECK(g["outputs"]["svetlichny_ideal"].get<double>() == Approx(4 * std::sqrt(2.0)).margin(1e-12));
  CHECK(g["flags"]["svetlichny_violated_ideal"] == true);
}

TEST_CASE("cde command") {
  const SettingsFile ghz{FamilySpec{"ghz", 0, kGhzSvetlichnyAzimuths}, std::nullopt, std::nullopt};
  const auto g = run_json([&](auto &o, auto &e) { return cmd_cde(ghz, Witness::svetlichny, o, e, true); }, kOk);
  CHECK(g["outputs"]["cde"].get<double>() == Approx(0.890508744271390).margin(1e-12));
  const auto t = run_json([](auto &o, auto &e) { return cmd_cde(theta(0.2), Witness::t2, o, e, true); }, kOk);
  CHECK(t["outputs"]["cde"].get<double>() == Approx(0.757550284816871).margin(1e-12));

  ExplicitSpec product;
  product.state[0] = 1.0;
  product.measurements = {{{0, 0}, {1, 0}, {0, 0}, {1, 0}, {0, 0}, {1, 0}}};
  const SettingsFile prod{product, std::nullopt, std::nullopt};
  for (Witness w : {Witness::svetlichny, Witness::t2}) {
    const auto msg = run_json([&](auto &o, auto &e) { return cmd_cde(prod, w, o, e); }, kFailed);
    CHECK_THAT(msg.get<std::string>(), ContainsSubstring("no violation"));
  }
}

TEST_CASE("mde output re-verifies through cde") {
  const auto path = std::filesystem::temp_directory_path() / "tmde_cli_mde.json";
  SearchConfig cfg;
  cfg.restarts = 3;
  cfg.seed = 2;
  const auto m = run_json([&](auto &o, auto &e) { return cmd_mde(Witness::svetlichny, cfg, path, o, e, true); }, kOk);
  const double best = m["outputs"]["best_eta"].get<double>();
  const SettingsFile dumped = load_settings(path);
  const auto c = run_json([&](auto &o, auto &e) { return cmd_cde(dumped, Witness::svetlichny, o, e, true); }, kOk);
  CHECK(c["outputs"]["cde"].get<double>() == Approx(best).margin(1e-9));
}

TEST_CASE("witness names") {
  CHECK(parse_witness("t2") == Witness::t2);
  CHECK(parse_witness("svetlichny") == Witness::svetlichny);
  CHECK_FALSE(parse_witness("chsh").has_value());
  CHECK(witness_name(Witness::t2) == "t2");
}
