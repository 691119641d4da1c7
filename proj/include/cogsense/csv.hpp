#ifndef COGSENSE_CSV_HPP_
#define COGSENSE_CSV_HPP_

// CSV output with a leading block of '#' manifest lines.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace cogsense {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::string command;  // subcommand and flags
  std::string tool_version = kToolVersion;
  std::string timestamp;  // ISO-8601 UTC
  std::string rng_id;
  std::vector<std::pair<std::string, std::string>> extra;  // additional key=value comments
};

/// ISO-8601 UTC rendering of a Unix time.
inline std::string iso8601_utc(std::int64_t unix_seconds) {
  const std::time_t t = static_cast<std::time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string now_iso8601_utc() {
  const auto now = std::chrono::system_clock::now();
  return iso8601_utc(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

/// Shortest round-trip-safe-enough rendering used for every CSV number.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(std::ostream& out, const RunManifest& manifest, std::vector<std::string> columns)
      : out_(out), width_(columns.size()) {
    out_ << "# tool=cogsense " << manifest.tool_version << '\n';
    out_ << "# command=" << manifest.command << '\n';
    out_ << "# scenario_hash=" << manifest.scenario_hash << '\n';
    out_ << "# seed=" << manifest.seed << '\n';
    if (!manifest.rng_id.empty()) out_ << "# rng=" << manifest.rng_id << '\n';
    out_ << "# timestamp=" << manifest.timestamp << '\n';
    for (const auto& [key, value] : manifest.extra) out_ << "# " << key << '=' << value << '\n';
    write_fields(columns);
  }

  void row(const std::vector<Cell>& cells) {
    std::vector<std::string> fields;
    fields.reserve(cells.size());
    for (const Cell& c : cells) {
      if (const auto* d = std::get_if<double>(&c)) {
        fields.push_back(format_number(*d));
      } else if (const auto* i = std::get_if<long long>(&c)) {
        fields.push_back(std::to_string(*i));
      } else {
        fields.push_back(std::get<std::string>(c));
      }
    }
    write_fields(fields);
  }

  std::size_t width() const { return width_; }

 private:
  void write_fields(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_escape(fields[i]);
    }
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t width_;
};

}  // namespace cogsense

#endif  // COGSENSE_CSV_HPP_
