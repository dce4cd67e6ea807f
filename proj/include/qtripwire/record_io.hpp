#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtripwire/detection.hpp"
#include "qtripwire/errors.hpp"
#include "qtripwire/schedule.hpp"

// Record streams on disk: one record per line, csv (with mandatory header)
// or json-lines. Doubles print with 17 significant digits so a re-read is
// bit-exact; byte-identical output for identical runs is part of the
// contract.

namespace qtw {

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::None: return "none";
    case Outcome::W1: return "w1";
    case Outcome::W2: return "w2";
    case Outcome::Both: return "both";
  }
  throw std::invalid_argument("unknown outcome");
}

inline Outcome outcome_from_name(std::string_view name) {
  if (name == "none") return Outcome::None;
  if (name == "w1") return Outcome::W1;
  if (name == "w2") return Outcome::W2;
  if (name == "both") return Outcome::Both;
  throw std::invalid_argument("unknown outcome name: " + std::string(name));
}

enum class RecordFormat { Csv, JsonLines };

inline constexpr std::string_view kRecordCsvHeader =
    "index,t_j,outcome,phi1,phi2";

inline std::string format_record_csv(const DetectionRecord& r) {
  std::string line = std::to_string(r.herald_index);
  line += ',';
  line += format_double(r.herald_time_ns);
  line += ',';
  line += outcome_name(r.outcome);
  line += ',';
  line += format_double(r.phi1);
  line += ',';
  line += format_double(r.phi2);
  return line;
}

inline std::string format_record_jsonl(const DetectionRecord& r) {
  std::string line = "{\"index\":";
  line += std::to_string(r.herald_index);
  line += ",\"t_j\":";
  line += format_double(r.herald_time_ns);
  line += ",\"outcome\":\"";
  line += outcome_name(r.outcome);
  line += "\",\"phi1\":";
  line += format_double(r.phi1);
  line += ",\"phi2\":";
  line += format_double(r.phi2);
  line += '}';
  return line;
}

namespace io_detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline double parse_double_field(std::string_view field, const char* what) {
  const std::string s(field);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument(std::string("bad ") + what + ": " + s);
  return v;
}

inline std::uint64_t parse_index_field(std::string_view field) {
  const std::string s(field);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("bad record index: " + s);
  return v;
}

}  // namespace io_detail

// window_center is derived data and not part of the line format; it is left
// zero on parse and can be restored from the run geometry.
inline DetectionRecord parse_record_csv(std::string_view line) {
  const auto f = io_detail::split_fields(line);
  if (f.size() != 5)
    throw std::invalid_argument("record line needs 5 fields: " +
                                std::string(line));
  DetectionRecord r;
  r.herald_index = io_detail::parse_index_field(f[0]);
  r.herald_time_ns = io_detail::parse_double_field(f[1], "herald time");
  r.outcome = outcome_from_name(f[2]);
  r.phi1 = io_detail::parse_double_field(f[3], "phi1");
  r.phi2 = io_detail::parse_double_field(f[4], "phi2");
  return r;
}

inline DetectionRecord parse_record_jsonl(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::invalid_argument("bad json record line: " + std::string(line));
  for (const char* key : {"index", "t_j", "outcome", "phi1", "phi2"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("record missing field: ") + key);
  DetectionRecord r;
  r.herald_index = j.at("index").get<std::uint64_t>();
  r.herald_time_ns = j.at("t_j").get<double>();
  r.outcome = outcome_from_name(j.at("outcome").get<std::string>());
  r.phi1 = j.at("phi1").get<double>();
  r.phi2 = j.at("phi2").get<double>();
  return r;
}

inline void write_records(std::ostream& os,
                          const std::vector<DetectionRecord>& records,
                          RecordFormat format) {
  if (format == RecordFormat::Csv) os << kRecordCsvHeader << '\n';
  for (const auto& r : records) {
    os << (format == RecordFormat::Csv ? format_record_csv(r)
                                       : format_record_jsonl(r));
    os << '\n';
  }
}

// Format is recognized from the content: a csv stream starts with the
// mandatory header, a json-lines stream with '{'.
inline std::vector<DetectionRecord> read_records(std::istream& is) {
  std::vector<DetectionRecord> out;
  std::string line;
  bool first = true;
  bool csv = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == kRecordCsvHeader) {
        csv = true;
        continue;
      }
      if (line.front() != '{')
        throw std::invalid_argument(
            "record stream must start with the csv header or a json object");
    }
    out.push_back(csv ? parse_record_csv(line) : parse_record_jsonl(line));
  }
  return out;
}

// --- phase schedule files ----------------------------------------------

inline constexpr std::string_view kScheduleSchema = "qtripwire-schedule/1";

inline std::string_view phase_mode_name(PhaseMode m) {
  return m == PhaseMode::FixedSecret ? "fixed-secret" : "qrng-binary";
}

inline PhaseMode phase_mode_from_name(std::string_view name) {
  if (name == "fixed-secret") return PhaseMode::FixedSecret;
  if (name == "qrng-binary") return PhaseMode::QrngBinary;
  throw std::invalid_argument("unknown phase mode: " + std::string(name));
}

inline void write_schedule(std::ostream& os, const PhaseSchedule& s) {
  os << "{\"schema\":\"" << kScheduleSchema << "\",\"mode\":\""
     << phase_mode_name(s.mode)
     << "\",\"broadcast_delay_ns\":" << format_double(s.broadcast_delay_ns)
     << ",\"phases\":[";
  for (std::size_t i = 0; i < s.phases.size(); ++i) {
    if (i) os << ',';
    os << '[' << format_double(s.phases[i].phi1) << ','
       << format_double(s.phases[i].phi2) << ']';
  }
  os << "]}\n";
}

inline PhaseSchedule read_schedule(std::istream& is) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad schedule file: ") + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != kScheduleSchema)
    throw std::invalid_argument("schedule file must declare schema \"" +
                                std::string(kScheduleSchema) + "\"");
  PhaseSchedule s;
  s.mode = phase_mode_from_name(j.at("mode").get<std::string>());
  s.broadcast_delay_ns = j.value("broadcast_delay_ns", 0.0);
  for (const auto& pair : j.at("phases")) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("schedule phases must be [phi1, phi2] pairs");
    s.phases.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return validated(s);
}

}  // namespace qtw
