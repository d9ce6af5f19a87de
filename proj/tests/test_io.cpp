#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tmde/commands.hpp"

using namespace tmde;
using namespace tmde::cli;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

std::filesystem::path scratch(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / "tmde_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("settings parse errors name the field") {
  auto fails_on = [](const std::string &text, const std::string &field) {
    CHECK_THROWS_WITH(parse_settings_text(text), ContainsSubstring(field));
  };
  fails_on("{", "settings");
  fails_on("[]", "object");
  fails_on(R"({})", "exactly one");
  fails_on(R"({"family":{"name":"theta","theta":0.2},"explicit":{}})", "exactly one");
  fails_on(R"({"family":{"name":"theta"}})", "family.theta");
  fails_on(R"({"family":{"name":"theta","theta":"x"}})", "family.theta");
  fails_on(R"({"family":{"name":"theta","theta":4.0}})", "theta");
  fails_on(R"({"family":{"name":"w"}})", "family.name");
  fails_on(R"({"family":{"name":"ghz","azimuths":[1,2]}})", "family.azimuths");
  fails_on(R"({"family":{"name":"ghz"},"noise_p":2})", "noise");
  fails_on(R"({"family":{"name":"ghz"},"efficiencies":[1,1]})", "efficiencies");
  fails_on(R"({"family":{"name":"ghz"},"colour":1})", "colour");
  fails_on(R"({"explicit":{"state":[[1,0]],"measurements":[]}})", "explicit.state");
  fails_on(R"({"explicit":{"state":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
               "measurements":[[0,0],[0,0],[0,0],[0,0],[0,0],[0,"a"]]}})",
           "explicit.measurements[5]");
  fails_on(R"({"explicit":{"state":[[2,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
               "measurements":[[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}})",
           "norm");
}

TEST_CASE("settings JSON round trip") {
  const auto from_search = SettingsFile::from_search(random_start(4));
  SettingsFile noisy = from_search;
  noisy.noise_p = 0.015;
  noisy.efficiencies = EfficiencyTriple(0.9, 0.8, 0.7);
  const SettingsFile family{FamilySpec{"theta", 0.123456789012345678, {}}, 0.01,
                            std::nullopt};
  const SettingsFile ghz{FamilySpec{"ghz", 0, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}},
                         std::nullopt, EfficiencyTriple::symmetric(0.9)};
  for (const auto &s : {from_search, noisy, family, ghz}) {
    const SettingsFile back = parse_settings_text(to_json(s).dump(2));
    CHECK(canonical_bytes(back) == canonical_bytes(s));
    CHECK(back.ideal_behavior().data() == s.ideal_behavior().data());
    const SettingsFile again = parse_settings(to_json(back));
    CHECK(canonical_bytes(again) == canonical_bytes(back));
  }
  const auto g = parse_settings_text(R"({"family":{"name":"ghz"}})");
  CHECK(std::get<FamilySpec>(g.source).azimuths == kGhzSvetlichnyAzimuths);
}

TEST_CASE("digest") {
  CHECK(digest("") == "cbf29ce484222325");
  CHECK(digest("a") == "af63dc4c8601ec8c");
  const SettingsFile a{FamilySpec{"theta", 0.2, {}}, std::nullopt, std::nullopt};
  SettingsFile b = a;
  CHECK(digest(canonical_bytes(a)) == digest(canonical_bytes(b)));
  b.noise_p = 0.0;
  CHECK(digest(canonical_bytes(a)) != digest(canonical_bytes(b)));
}

TEST_CASE("grid parsing") {
  const auto g = parse_grid("0.01:1.0471975512:200");
  CHECK(g.lo == 0.01);
  CHECK(g.n == 200);
  const auto pts = g.points();
  CHECK(pts.front() == 0.01);
  CHECK(pts.back() == Approx(1.0471975512).margin(1e-15));
  CHECK(LinearGrid{0.3, 0.3, 1}.points() == std::vector<double>{0.3});
  for (const char *bad : {"1:2", "a:1:3", "0:1:0", "1:0:5", "0:1:2x"})
    CHECK_THROWS_AS(parse_grid(bad), settings_error);
}

TEST_CASE("sweep CSV is reproducible byte for byte") {
  const auto path = scratch("sweep.csv");
  std::ostringstream out;
  const LinearGrid th{0.01, std::numbers::pi / 3, 17}, ps{0.0, 0.02, 5};
  REQUIRE(cmd_sweep(th, ps, path, out) == kOk);
  const std::string first = slurp(path);
  REQUIRE(cmd_sweep(th, ps, path, out) == kOk);
  CHECK(slurp(path) == first);
  CHECK(first.rfind("theta,p,eta_min\n", 0) == 0);
  CHECK(std::count(first.begin(), first.end(), '\n') == 1 + 17 * 5);
  // the theta = pi/3, p = 0 row sits exactly on the boundary
  CHECK_THAT(first, ContainsSubstring("1.0471975512,0,none"));
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}

TEST_CASE("result records") {
  ResultRecord r;
  r.command = "cde";
  r.input_digest = "0123456789abcdef";
  r.outputs["cde"] = 0.5;
  r.outputs["missing"] = std::nullopt;
  r.flags["ok"] = true;
  const auto j = r.to_json();
  CHECK(j["outputs"]["cde"] == 0.5);
  CHECK(j["outputs"]["missing"].is_null());
  CHECK(j["timestamp"].get<std::string>().size() == 20);
  CHECK_THAT(r.to_text(), ContainsSubstring("missing = none"));
}
