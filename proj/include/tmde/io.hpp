#pragma once

// Settings files, result records and sweep CSV.

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tmde/detector.hpp"
#include "tmde/families.hpp"
#include "tmde/qcore.hpp"
#include "tmde/search.hpp"

namespace tmde {

using json = nlohmann::json;

/// Malformed settings; the message names the offending field.
class settings_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/*******************************************************************************
 * SettingsFile
 ******************************************************************************/

struct FamilySpec {
  std::string name; // "theta" or "ghz"
  double theta = 0.0;
  std::array<double, 6> azimuths = kGhzSvetlichnyAzimuths;
};

struct ExplicitSpec {
  std::array<complex_t, 8> state{};
  /// (polar, azimuth) for A0 A1 B0 B1 C0 C1
  std::array<std::array<double, 2>, 6> measurements{};
};

struct SettingsFile {
  std::variant<FamilySpec, ExplicitSpec> source;
  std::optional<double> noise_p;
  std::optional<EfficiencyTriple> efficiencies;

  PureState pure_state() const {
    if (const auto *f = std::get_if<FamilySpec>(&source)) {
      if (f->name == "theta")
        return theta_state(ThetaSetting(f->theta));
      return ghz_setting(f->azimuths).first;
    }
    const auto &e = std::get<ExplicitSpec>(source);
    Vector8c v;
    for (std::size_t i = 0; i < 8; ++i)
      v[static_cast<Eigen::Index>(i)] = e.state[i];
    return PureState(v);
  }

  SettingsTriple settings() const {
    if (const auto *f = std::get_if<FamilySpec>(&source)) {
      if (f->name == "theta")
        return theta_measurements(ThetaSetting(f->theta));
      return ghz_setting(f->azimuths).second;
    }
    const auto &e = std::get<ExplicitSpec>(source);
    SettingsTriple s;
    for (std::size_t m = 0; m < 6; ++m)
      s.parties[m / 2][m % 2] =
          QubitMeasurement{e.measurements[m][0], e.measurements[m][1]};
    return s;
  }

  /// Unit-efficiency behavior, with white noise when noise_p is set.
  BehaviorTensor ideal_behavior() const {
    if (!noise_p)
      return behavior_from_state(pure_state(), settings());
    const DensityMatrix rho =
        mix_white_noise(density_from_pure(pure_state()), NoiseLevel(*noise_p));
    return behavior_from_settings(rho, settings());
  }

  static SettingsFile from_search(const SettingsParameterization &p) {
    const PureState psi = p.state();
    ExplicitSpec e;
    for (std::size_t i = 0; i < 8; ++i)
      e.state[i] = psi[i];
    for (std::size_t m = 0; m < 6; ++m)
      e.measurements[m] = {p.measurement_angles[2 * m],
                           p.measurement_angles[2 * m + 1]};
    return SettingsFile{e, std::nullopt, std::nullopt};
  }
};

namespace detail {

inline double number_at(const json &j, const std::string &field) {
  if (!j.is_number())
    throw settings_error("field '" + field + "': expected a number");
  return j.get<double>();
}

template <std::size_t N>
std::array<double, N> numbers_at(const json &j, const std::string &field) {
  if (!j.is_array() || j.size() != N)
    throw settings_error("field '" + field + "': expected an array of " +
                         std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i)
    out[i] = number_at(j[i], field + "[" + std::to_string(i) + "]");
  return out;
}

inline void reject_unknown(const json &j, const std::string &where,
                           std::initializer_list<const char *> allowed) {
  for (const auto &item : j.items()) {
    bool ok = false;
    for (const char *a : allowed)
      ok = ok || item.key() == a;
    if (!ok)
      throw settings_error("unknown field '" + where + item.key() + "'");
  }
}

} // namespace detail

/// Parses and validates a settings document. Angles are radians.
inline SettingsFile parse_settings(const json &j) {
  using namespace detail;
  if (!j.is_object())
    throw settings_error("settings: expected a JSON object");
  reject_unknown(j, "", {"family", "explicit", "noise_p", "efficiencies"});
  const bool has_family = j.contains("family");
  const bool has_explicit = j.contains("explicit");
  if (has_family == has_explicit)
    throw settings_error(
        "settings: exactly one of 'family' and 'explicit' is required");

  SettingsFile out{FamilySpec{}, std::nullopt, std::nullopt};
  try {
    if (has_family) {
      const json &f = j.at("family");
      if (!f.is_object() || !f.contains("name") || !f.at("name").is_string())
        throw settings_error("field 'family.name': expected a string");
      FamilySpec spec;
      spec.name = f.at("name").get<std::string>();
      if (spec.name == "theta") {
        reject_unknown(f, "family.", {"name", "theta"});
        if (!f.contains("theta"))
          throw settings_error("field 'family.theta': required for theta");
        spec.theta = number_at(f.at("theta"), "family.theta");
        (void)ThetaSetting(spec.theta);
      } else if (spec.name == "ghz") {
        reject_unknown(f, "family.", {"name", "azimuths"});
        if (f.contains("azimuths"))
          spec.azimuths = numbers_at<6>(f.at("azimuths"), "family.azimuths");
      } else {
        throw settings_error("field 'family.name': unknown family '" +
                             spec.name + "'");
      }
      out.source = spec;
    } else {
      const json &e = j.at("explicit");
      if (!e.is_object())
        throw settings_error("field 'explicit': expected an object");
      reject_unknown(e, "explicit.", {"state", "measurements"});
      if (!e.contains("state") || !e.at("state").is_array() ||
          e.at("state").size() != 8)
        throw settings_error(
            "field 'explicit.state': expected 8 [re, im] pairs");
      if (!e.contains("measurements") || !e.at("measurements").is_array() ||
          e.at("measurements").size() != 6)
        throw settings_error(
            "field 'explicit.measurements': expected 6 [polar, azimuth] pairs");
      ExplicitSpec spec;
      for (std::size_t i = 0; i < 8; ++i) {
        const auto re_im = numbers_at<2>(
            e.at("state")[i], "explicit.state[" + std::to_string(i) + "]");
        spec.state[i] = complex_t(re_im[0], re_im[1]);
      }
      for (std::size_t m = 0; m < 6; ++m) {
        const auto pa = numbers_at<2>(e.at("measurements")[m],
                                      "explicit.measurements[" +
                                          std::to_string(m) + "]");
        spec.measurements[m] = {pa[0], pa[1]};
      }
      out.source = spec;
    }
    if (j.contains("noise_p")) {
      out.noise_p = number_at(j.at("noise_p"), "noise_p");
      (void)NoiseLevel(*out.noise_p);
    }
    if (j.contains("efficiencies")) {
      const auto e = numbers_at<3>(j.at("efficiencies"), "efficiencies");
      out.efficiencies = EfficiencyTriple(e[0], e[1], e[2]);
    }
    (void)out.pure_state();
  } catch (const invalid_value &err) {
    throw settings_error(std::string("settings: ") + err.what());
  }
  return out;
}

inline SettingsFile parse_settings_text(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &err) {
    throw settings_error(std::string("settings: ") + err.what());
  }
  return parse_settings(j);
}

inline SettingsFile load_settings(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw settings_error("settings: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_settings_text(ss.str());
}

inline json to_json(const SettingsFile &s) {
  json j;
  if (const auto *f = std::get_if<FamilySpec>(&s.source)) {
    j["family"]["name"] = f->name;
    if (f->name == "theta")
      j["family"]["theta"] = f->theta;
    else
      j["family"]["azimuths"] = f->azimuths;
  } else {
    const auto &e = std::get<ExplicitSpec>(s.source);
    json state = json::array();
    for (const auto &c : e.state)
      state.push_back({c.real(), c.imag()});
    json meas = json::array();
    for (const auto &m : e.measurements)
      meas.push_back({m[0], m[1]});
    j["explicit"] = {{"state", state}, {"measurements", meas}};
  }
  if (s.noise_p)
    j["noise_p"] = *s.noise_p;
  if (s.efficiencies)
    j["efficiencies"] = {s.efficiencies->eta_a, s.efficiencies->eta_b,
                         s.efficiencies->eta_c};
  return j;
}

/// Keys sorted, no whitespace.
inline std::string canonical_bytes(const SettingsFile &s) {
  return to_json(s).dump();
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string digest(const std::string &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

/*******************************************************************************
 * Output
 ******************************************************************************/

/// Writes through a temporary file and renames it into place.
inline void write_atomically(const std::filesystem::path &path,
                             const std::string &contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush())
      throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ResultRecord {
  std::string command;
  std::string input_digest;
  /// nullopt renders as "none"
  std::map<std::string, std::optional<double>> outputs;
  std::map<std::string, bool> flags;
  std::vector<std::string> diagnostics;
  std::string timestamp = utc_timestamp();

  json to_json() const {
    json j;
    j["command"] = command;
    j["input_digest"] = input_digest;
    j["outputs"] = json::object();
    for (const auto &[k, v] : outputs)
      j["outputs"][k] = v ? json(*v) : json(nullptr);
    j["flags"] = flags;
    j["diagnostics"] = diagnostics;
    j["timestamp"] = timestamp;
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << command << "\n  digest    " << input_digest << '\n';
    char buf[64];
    for (const auto &[k, v] : outputs) {
      if (v)
        std::snprintf(buf, sizeof buf, "%.12g", *v);
      else
        std::snprintf(buf, sizeof buf, "none");
      os << "  " << k << " = " << buf << '\n';
    }
    for (const auto &[k, v] : flags)
      os << "  " << k << ": " << (v ? "yes" : "no") << '\n';
    for (const auto &d : diagnostics)
      os << "  note: " << d << '\n';
    return os.str();
  }
};

/// Header `theta,p,eta_min`; eta_min with 12 decimals or `none`.
inline std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::string out = "theta,p,eta_min\n";
  char buf[96];
  for (const auto &r : rows) {
    if (r.eta_min)
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12f\n", r.theta, r.p,
                    *r.eta_min);
    else
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,none\n", r.theta, r.p);
    out += buf;
  }
  return out;
}

/// Parses `lo:hi:n`.
inline LinearGrid parse_grid(const std::string &text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw settings_error("grid '" + text + "': expected lo:hi:n");
  try {
    std::size_t used = 0;
    LinearGrid g{};
    g.lo = std::stod(text.substr(0, c1));
    g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const std::string n = text.substr(c2 + 1);
    g.n = std::stoi(n, &used);
    if (used != n.size() || g.n < 1 || g.hi < g.lo)
      throw std::invalid_argument("bad grid");
    return g;
  } catch (const std::logic_error &) {
    throw settings_error("grid '" + text + "': expected lo:hi:n with lo <= hi "
                         "and n >= 1");
  }
}

} // namespace tmde
