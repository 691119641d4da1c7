#ifndef COGSENSE_RADIO_MODEL_HPP_
#define COGSENSE_RADIO_MODEL_HPP_

// Scenario parameters of the interweave link and the received powers / SNRs
// derived from them. All values are stored linear and in SI units; the text
// configuration accepts dB, dBm, ms and MHz through key suffixes.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cogsense/errors.hpp"

namespace cogsense {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

struct Scenario {
  double f_s = 0.0;        // sampling frequency [Hz]
  double T = 0.0;          // frame duration [s]
  double h_p1_gain = 0.0;  // sensing channel PT -> ST power gain
  double h_p2_gain = 0.0;  // interference channel PT -> SR power gain
  double h_s_gain = 0.0;   // access channel ST -> SR power gain
  double sigma_w2 = 0.0;   // noise power [W]
  double P_tx_PT = 0.0;    // [W]
  double P_tx_ST = 0.0;    // [W]
  double p_H1 = 0.0;
  double target_pd = 0.0;
  double kappa = 0.0;
  int N_s = 0;   // pilot symbols for the access channel
  int N_p2 = 0;  // samples for the interference channel

  bool operator==(const Scenario&) const = default;
};

struct DerivedPowers {
  double P_rx_ST = 0.0;
  double P_rx_SR = 0.0;
  double gamma_p1 = 0.0;
  double gamma_p2 = 0.0;
  double gamma_s = 0.0;
};

/// Every violated Scenario invariant, empty when the scenario is valid.
/// Channel gains may be zero (no path); all other physical values must be positive.
inline std::vector<std::string> scenario_problems(const Scenario& s) {
  std::vector<std::string> out;
  auto positive = [&out](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be positive");
  };
  auto non_negative = [&out](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      out.push_back(std::string(name) + " must be non-negative");
    }
  };
  auto open_unit = [&out](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) out.push_back(std::string(name) + " must lie in (0,1)");
  };
  positive(s.f_s, "f_s");
  positive(s.T, "T");
  non_negative(s.h_p1_gain, "h_p1_gain");
  non_negative(s.h_p2_gain, "h_p2_gain");
  non_negative(s.h_s_gain, "h_s_gain");
  positive(s.sigma_w2, "sigma_w2");
  positive(s.P_tx_PT, "P_tx_PT");
  positive(s.P_tx_ST, "P_tx_ST");
  open_unit(s.p_H1, "p_H1");
  open_unit(s.target_pd, "target_pd");
  open_unit(s.kappa, "kappa");
  if (s.N_s < 1) out.emplace_back("N_s must be at least 1");
  if (s.N_p2 < 1) out.emplace_back("N_p2 must be at least 1");
  if (s.f_s > 0.0 && s.T > 0.0 && s.T * s.f_s < 2.0) {
    out.emplace_back("T * f_s must cover at least two samples");
  }
  return out;
}

inline void validate(const Scenario& s) {
  if (auto problems = scenario_problems(s); !problems.empty()) {
    throw ValidationError(std::move(problems));
  }
}

inline DerivedPowers derive(const Scenario& s) {
  validate(s);
  DerivedPowers d;
  d.P_rx_ST = s.h_p1_gain * s.P_tx_PT + s.sigma_w2;
  d.P_rx_SR = s.h_p2_gain * s.P_tx_PT + s.sigma_w2;
  d.gamma_p1 = s.h_p1_gain * s.P_tx_PT / s.sigma_w2;
  d.gamma_p2 = s.h_p2_gain * s.P_tx_PT / s.sigma_w2;
  d.gamma_s = s.h_s_gain * s.P_tx_ST / s.sigma_w2;
  return d;
}

/// Reference parameter set of the numerical study (1 MHz, 100 ms frames,
/// -100 dBm noise, gamma_p1 = gamma_p2 = -10 dB, gamma_s = 10 dB).
inline Scenario table2() {
  Scenario s;
  s.f_s = 1e6;
  s.T = 100e-3;
  s.h_p1_gain = db_to_linear(-100.0);
  s.h_p2_gain = db_to_linear(-100.0);
  s.h_s_gain = db_to_linear(-80.0);
  s.sigma_w2 = dbm_to_watts(-100.0);
  s.P_tx_PT = dbm_to_watts(-10.0);
  s.P_tx_ST = dbm_to_watts(-10.0);
  s.p_H1 = 0.2;
  s.target_pd = 0.9;
  s.kappa = 0.05;
  s.N_s = 10;
  s.N_p2 = 1000;
  return s;
}

/// Scenario with h_p1_gain chosen so that the sensing SNR equals gamma_p1_db.
inline Scenario with_gamma_p1_db(Scenario s, double gamma_p1_db) {
  s.h_p1_gain = db_to_linear(gamma_p1_db) * s.sigma_w2 / s.P_tx_PT;
  return s;
}

inline Scenario with_gamma_p2_db(Scenario s, double gamma_p2_db) {
  s.h_p2_gain = db_to_linear(gamma_p2_db) * s.sigma_w2 / s.P_tx_PT;
  return s;
}

inline Scenario with_gamma_s_db(Scenario s, double gamma_s_db) {
  s.h_s_gain = db_to_linear(gamma_s_db) * s.sigma_w2 / s.P_tx_ST;
  return s;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

enum class Unit { Plain, Db, Dbm, Ms, Mhz };

struct KeyForm {
  const char* base;
  Unit unit;
  const char* suffix;
};

inline constexpr KeyForm kKeyForms[] = {
    {"f_s", Unit::Plain, ""},          {"f_s", Unit::Mhz, "_mhz"},
    {"T", Unit::Plain, ""},            {"T", Unit::Ms, "_ms"},
    {"h_p1_gain", Unit::Plain, ""},    {"h_p1_gain", Unit::Db, "_db"},
    {"h_p2_gain", Unit::Plain, ""},    {"h_p2_gain", Unit::Db, "_db"},
    {"h_s_gain", Unit::Plain, ""},     {"h_s_gain", Unit::Db, "_db"},
    {"sigma_w2", Unit::Plain, ""},     {"sigma_w2", Unit::Dbm, "_dbm"},
    {"P_tx_PT", Unit::Plain, ""},      {"P_tx_PT", Unit::Dbm, "_dbm"},
    {"P_tx_ST", Unit::Plain, ""},      {"P_tx_ST", Unit::Dbm, "_dbm"},
    {"p_H1", Unit::Plain, ""},         {"target_pd", Unit::Plain, ""},
    {"kappa", Unit::Plain, ""},        {"N_s", Unit::Plain, ""},
    {"N_p2", Unit::Plain, ""},         {"gamma_p1", Unit::Db, "_db"},
    {"gamma_p2", Unit::Db, "_db"},     {"gamma_s", Unit::Db, "_db"},
};

inline constexpr const char* kRequired[] = {"f_s",      "T",       "h_p1_gain", "h_p2_gain",
                                            "h_s_gain", "sigma_w2", "P_tx_PT",  "P_tx_ST",
                                            "p_H1",     "target_pd", "kappa",   "N_s",
                                            "N_p2"};

inline double convert(Unit unit, double v) {
  switch (unit) {
    case Unit::Db:
      return db_to_linear(v);
    case Unit::Dbm:
      return dbm_to_watts(v);
    case Unit::Ms:
      return v * 1e-3;
    case Unit::Mhz:
      return v * 1e6;
    case Unit::Plain:
      break;
  }
  return v;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  double value;  // already converted to linear / SI
  double raw;
  int line;
};

}  // namespace detail

/// Parses `key = value` scenario text. Each Scenario field is given exactly
/// once, either bare (linear, SI) or with a unit suffix (_db, _dbm, _ms, _mhz).
/// Optional gamma_p1_db / gamma_p2_db / gamma_s_db entries are cross-checked
/// against the gains and rejected when inconsistent.
inline Scenario load_scenario(std::string_view text) {
  std::map<std::string, detail::Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("", line_no, "expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value_text = detail::trim(line.substr(eq + 1));

    const detail::KeyForm* form = nullptr;
    for (const auto& candidate : detail::kKeyForms) {
      if (key == std::string(candidate.base) + candidate.suffix) {
        form = &candidate;
        break;
      }
    }
    if (form == nullptr) throw ParseError(key, line_no, "unknown key '" + key + "'");

    const std::string base = form->base;
    double raw = 0.0;
    const bool integral = base == "N_s" || base == "N_p2";
    if (integral) {
      long long n = 0;
      const auto [ptr, ec] =
          std::from_chars(value_text.data(), value_text.data() + value_text.size(), n);
      if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
        throw ParseError(key, line_no, "'" + key + "' needs an integer value");
      }
      raw = static_cast<double>(n);
    } else {
      const auto [ptr, ec] =
          std::from_chars(value_text.data(), value_text.data() + value_text.size(), raw);
      if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
        throw ParseError(key, line_no, "'" + key + "' needs a numeric value");
      }
    }
    if (entries.contains(base)) {
      throw ParseError(key, line_no, "'" + base + "' given more than once");
    }
    entries.emplace(base, detail::Entry{detail::convert(form->unit, raw), raw, line_no});
  }

  std::vector<std::string> missing;
  for (const char* name : detail::kRequired) {
    if (!entries.contains(name)) missing.emplace_back(name);
  }
  if (!missing.empty()) {
    std::string message = "missing required key";
    message += missing.size() > 1 ? "s: " : ": ";
    for (std::size_t i = 0; i < missing.size(); ++i) {
      if (i > 0) message += ", ";
      message += missing[i];
    }
    throw ParseError(missing.front(), 0, message);
  }

  Scenario s;
  s.f_s = entries.at("f_s").value;
  s.T = entries.at("T").value;
  s.h_p1_gain = entries.at("h_p1_gain").value;
  s.h_p2_gain = entries.at("h_p2_gain").value;
  s.h_s_gain = entries.at("h_s_gain").value;
  s.sigma_w2 = entries.at("sigma_w2").value;
  s.P_tx_PT = entries.at("P_tx_PT").value;
  s.P_tx_ST = entries.at("P_tx_ST").value;
  s.p_H1 = entries.at("p_H1").value;
  s.target_pd = entries.at("target_pd").value;
  s.kappa = entries.at("kappa").value;
  s.N_s = static_cast<int>(entries.at("N_s").raw);
  s.N_p2 = static_cast<int>(entries.at("N_p2").raw);
  const DerivedPowers d = derive(s);

  std::vector<std::string> inconsistent;
  auto check = [&](const char* name, double derived_linear) {
    if (const auto it = entries.find(name); it != entries.end()) {
      const double given_db = it->second.raw;
      if (!(derived_linear > 0.0) || std::abs(linear_to_db(derived_linear) - given_db) > 1e-6) {
        inconsistent.push_back(std::string(name) + "_db = " + detail::format_double(given_db) +
                               " contradicts the gains (derived " +
                               detail::format_double(derived_linear > 0.0
                                                         ? linear_to_db(derived_linear)
                                                         : -INFINITY) +
                               " dB)");
      }
    }
  };
  check("gamma_p1", d.gamma_p1);
  check("gamma_p2", d.gamma_p2);
  check("gamma_s", d.gamma_s);
  if (!inconsistent.empty()) throw ValidationError(std::move(inconsistent));
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", 0, "cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

/// Canonical linear-unit config text; load_scenario(to_config_text(s)) == s.
inline std::string to_config_text(const Scenario& s) {
  std::string out;
  auto put = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  put("f_s", detail::format_double(s.f_s));
  put("T", detail::format_double(s.T));
  put("h_p1_gain", detail::format_double(s.h_p1_gain));
  put("h_p2_gain", detail::format_double(s.h_p2_gain));
  put("h_s_gain", detail::format_double(s.h_s_gain));
  put("sigma_w2", detail::format_double(s.sigma_w2));
  put("P_tx_PT", detail::format_double(s.P_tx_PT));
  put("P_tx_ST", detail::format_double(s.P_tx_ST));
  put("p_H1", detail::format_double(s.p_H1));
  put("target_pd", detail::format_double(s.target_pd));
  put("kappa", detail::format_double(s.kappa));
  put("N_s", std::to_string(s.N_s));
  put("N_p2", std::to_string(s.N_p2));
  return out;
}

/// FNV-1a 64-bit digest of the canonical config text, as 16 hex digits.
inline std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : to_config_text(s)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cogsense

#endif  // COGSENSE_RADIO_MODEL_HPP_
