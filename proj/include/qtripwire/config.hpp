#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "qtripwire/detection.hpp"
#include "qtripwire/errors.hpp"
#include "qtripwire/interferometer.hpp"
#include "qtripwire/monitor.hpp"
#include "qtripwire/record_io.hpp"
#include "qtripwire/scenario.hpp"
#include "qtripwire/schedule.hpp"
#include "qtripwire/source.hpp"
#include "qtripwire/units.hpp"

namespace qtw {

inline constexpr std::string_view kConfigSchema = "qtripwire-config/1";

struct SweepConfig {
  double delta_min_ns = 0.0;
  double delta_max_ns = 0.3;
  std::size_t points = 61;
};

struct ScheduleConfig {
  PhaseMode mode = PhaseMode::FixedSecret;
  double phi1_rad = 0.0;  // fixed-secret arm settings
  double phi2_rad = 0.0;
  double broadcast_delay_ns = 0.0;
};

struct OutputConfig {
  std::string records = "records.csv";
  std::string schedule = "schedule.json";
  std::string summary = "summary.json";
  RecordFormat format = RecordFormat::Csv;
};

struct RunControl {
  double duration_ns = 5000.0;
  std::uint64_t seed = 12345;
  std::uint64_t calibration_heralds = 2000;
  AlarmConfig alarm;
  bool compensate_delay = true;  // center windows on the walked-off envelope
};

// Everything a command needs, in internal units, already validated.
struct RunConfig {
  SourceParams source;
  PerimeterGeometry geometry{25.0, 50.0, 25.0, 100.0};
  DetectorModel detector;
  Scenario scenario = Normal{};
  ScheduleConfig schedule;
  RunControl run;
  SweepConfig sweep;
  std::size_t oracle_points_per_width = 2048;
  OutputConfig outputs;
};

inline RunPhysics make_run_physics(const RunConfig& c) {
  const double beta = derive_beta(c.source);
  const double walkoff = compensation_delay_ns(c.source);
  RunPhysics p;
  p.beta = beta;
  p.omega_p = c.source.pump_frequency;
  p.window_center_offset_ns =
      c.geometry.transit_bottom_ns() +
      (c.run.compensate_delay ? walkoff : 0.0);
  p.envelope_offset_ns = c.run.compensate_delay ? 0.0 : walkoff;
  return p;
}

namespace config_detail {

[[noreturn]] inline void fail(const std::string& where,
                              const std::string& what) {
  throw ConfigError("config " + where + ": " + what);
}

inline void require_known(const nlohmann::json& obj, const std::string& where,
                          std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const auto a : allowed) ok = ok || item.key() == a;
    if (!ok) fail(where, "unknown field \"" + item.key() + "\"");
  }
}

inline double number_or(const nlohmann::json& obj, const std::string& where,
                        const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "must be a number");
  return v.get<double>();
}

inline std::uint64_t uint_or(const nlohmann::json& obj,
                             const std::string& where, const char* key,
                             std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0))
    fail(where + "." + key, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

inline bool bool_or(const nlohmann::json& obj, const std::string& where,
                    const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail(where + "." + key, "must be a boolean");
  return v.get<bool>();
}

inline std::string string_or(const nlohmann::json& obj,
                             const std::string& where, const char* key,
                             std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key, "must be a string");
  return v.get<std::string>();
}

inline double require_number(const nlohmann::json& obj,
                             const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where, std::string("missing field \"") + key + '"');
  return number_or(obj, where, key, 0.0);
}

inline SourceParams parse_source(const nlohmann::json& j) {
  require_known(j, "source",
                {"pump_wavelength_nm", "pump_frequency_cycles_per_ns",
                 "idler_bandwidth_cycles_per_ns", "crystal_length_mm",
                 "group_velocity_mismatch_ns_per_mm", "sinc_gaussian_factor",
                 "herald_rate_per_ns"});
  SourceParams s;
  const double wavelength = number_or(j, "source", "pump_wavelength_nm", 400.0);
  if (!(wavelength > 0.0)) fail("source.pump_wavelength_nm", "must be > 0");
  s.pump_frequency = units::frequency_from_wavelength_nm(wavelength);
  if (j.contains("pump_frequency_cycles_per_ns")) {
    const double nu =
        number_or(j, "source", "pump_frequency_cycles_per_ns", 0.0);
    if (!(nu > 0.0)) fail("source.pump_frequency_cycles_per_ns", "must be > 0");
    if (j.contains("pump_wavelength_nm") &&
        std::fabs(nu - s.pump_frequency) > 1e-6 * s.pump_frequency)
      fail("source", "pump_wavelength_nm and pump_frequency_cycles_per_ns "
                     "describe different pumps");
    s.pump_frequency = nu;
  }
  s.idler_bandwidth =
      number_or(j, "source", "idler_bandwidth_cycles_per_ns", 10.0);
  s.crystal_length_mm = number_or(j, "source", "crystal_length_mm", 0.0);
  s.group_velocity_mismatch =
      number_or(j, "source", "group_velocity_mismatch_ns_per_mm", 0.0);
  s.sinc_gaussian_factor =
      number_or(j, "source", "sinc_gaussian_factor", 0.193);
  s.herald_rate_per_ns = number_or(j, "source", "herald_rate_per_ns", 2.0);
  if (!(s.herald_rate_per_ns > 0.0))
    fail("source.herald_rate_per_ns", "must be > 0");
  try {
    derive_beta(s);
  } catch (const std::exception& e) {
    fail("source", e.what());
  }
  return s;
}

inline PerimeterGeometry parse_geometry(const nlohmann::json& j) {
  require_known(j, "geometry_m", {"left", "top", "right", "bottom"});
  PerimeterGeometry g{number_or(j, "geometry_m", "left", 25.0),
                      number_or(j, "geometry_m", "top", 50.0),
                      number_or(j, "geometry_m", "right", 25.0),
                      number_or(j, "geometry_m", "bottom", 100.0)};
  try {
    return validated(g);
  } catch (const std::exception& e) {
    fail("geometry_m", e.what());
  }
}

inline DetectorModel parse_detector(const nlohmann::json& j) {
  require_known(j, "detector",
                {"efficiency_w1", "efficiency_w2", "dark_count_rate_per_ns",
                 "resolving_time_ns"});
  DetectorModel d;
  d.efficiency_w1 = number_or(j, "detector", "efficiency_w1", 1.0);
  d.efficiency_w2 = number_or(j, "detector", "efficiency_w2", 1.0);
  d.dark_count_rate_per_ns =
      number_or(j, "detector", "dark_count_rate_per_ns", 0.0);
  d.window.resolving_time_ns =
      number_or(j, "detector", "resolving_time_ns", 0.1);
  try {
    validated(d);
    dark_click_probability(d);  // windowed dark probability must exist
  } catch (const std::exception& e) {
    fail("detector", e.what());
  }
  return d;
}

inline Corner parse_corner(const nlohmann::json& j) {
  const std::string name = string_or(j, "scenario", "corner", "first");
  if (name == "first") return Corner::First;
  if (name == "second") return Corner::Second;
  fail("scenario.corner", "must be \"first\" or \"second\"");
}

inline Scenario parse_scenario(const nlohmann::json& j) {
  const std::string type = string_or(j, "scenario", "type", "normal");
  if (type == "normal") {
    require_known(j, "scenario", {"type"});
    return Normal{};
  }
  if (type == "block") {
    require_known(j, "scenario", {"type"});
    return Block{};
  }
  if (type == "side-intrusion") {
    require_known(j, "scenario",
                  {"type", "delta_ns", "xi_rad", "xi_wavelength_nm"});
    SideIntrusion si;
    si.delta_ns = require_number(j, "scenario", "delta_ns");
    if (!(si.delta_ns >= 0.0)) fail("scenario.delta_ns", "must be >= 0");
    if (j.contains("xi_rad") && j.contains("xi_wavelength_nm"))
      fail("scenario", "xi_rad and xi_wavelength_nm are mutually exclusive");
    if (j.contains("xi_rad"))
      si.xi_override_rad = number_or(j, "scenario", "xi_rad", 0.0);
    si.xi_wavelength_nm = number_or(j, "scenario", "xi_wavelength_nm", 0.0);
    if (j.contains("xi_wavelength_nm") && !(si.xi_wavelength_nm > 0.0))
      fail("scenario.xi_wavelength_nm", "must be > 0");
    return si;
  }
  if (type == "cross-intrusion") {
    require_known(j, "scenario", {"type", "phi_int_rad", "corner"});
    CrossIntrusion ci;
    ci.phi_int_rad = require_number(j, "scenario", "phi_int_rad");
    ci.corner = parse_corner(j);
    return ci;
  }
  if (type == "intercept-resend") {
    require_known(j, "scenario", {"type"});
    return InterceptResend{};
  }
  fail("scenario.type", "unknown scenario \"" + type + '"');
}

inline ScheduleConfig parse_schedule(const nlohmann::json& j) {
  require_known(j, "schedule",
                {"mode", "phi1_rad", "phi2_rad", "broadcast_delay_ns"});
  ScheduleConfig s;
  const std::string mode = string_or(j, "schedule", "mode", "fixed-secret");
  try {
    s.mode = phase_mode_from_name(mode);
  } catch (const std::exception& e) {
    fail("schedule.mode", e.what());
  }
  if (s.mode == PhaseMode::QrngBinary &&
      (j.contains("phi1_rad") || j.contains("phi2_rad")))
    fail("schedule", "phi1_rad/phi2_rad have no effect in qrng-binary mode");
  s.phi1_rad = number_or(j, "schedule", "phi1_rad", 0.0);
  s.phi2_rad = number_or(j, "schedule", "phi2_rad", 0.0);
  s.broadcast_delay_ns = number_or(j, "schedule", "broadcast_delay_ns", 0.0);
  if (!(s.broadcast_delay_ns >= 0.0))
    fail("schedule.broadcast_delay_ns", "must be >= 0");
  return s;
}

inline RunControl parse_run(const nlohmann::json& j) {
  require_known(j, "run",
                {"duration_ns", "seed", "calibration_heralds", "alarm",
                 "compensate_delay"});
  RunControl r;
  r.duration_ns = number_or(j, "run", "duration_ns", 5000.0);
  if (!(r.duration_ns > 0.0)) fail("run.duration_ns", "must be > 0");
  r.seed = uint_or(j, "run", "seed", 12345);
  r.calibration_heralds = uint_or(j, "run", "calibration_heralds", 2000);
  if (r.calibration_heralds < 1)
    fail("run.calibration_heralds", "must be >= 1");
  r.compensate_delay = bool_or(j, "run", "compensate_delay", true);
  if (j.contains("alarm")) {
    const auto& a = j.at("alarm");
    require_known(a, "run.alarm", {"nu", "epsilon1", "epsilon2", "window"});
    r.alarm.nu = number_or(a, "run.alarm", "nu", r.alarm.nu);
    r.alarm.epsilon1 = number_or(a, "run.alarm", "epsilon1", r.alarm.epsilon1);
    r.alarm.epsilon2 = number_or(a, "run.alarm", "epsilon2", r.alarm.epsilon2);
    r.alarm.window = uint_or(a, "run.alarm", "window", r.alarm.window);
  }
  try {
    validated(r.alarm);
  } catch (const std::exception& e) {
    fail("run.alarm", e.what());
  }
  return r;
}

inline SweepConfig parse_sweep(const nlohmann::json& j) {
  require_known(j, "sweep", {"delta_min_ns", "delta_max_ns", "points"});
  SweepConfig s;
  s.delta_min_ns = number_or(j, "sweep", "delta_min_ns", s.delta_min_ns);
  s.delta_max_ns = number_or(j, "sweep", "delta_max_ns", s.delta_max_ns);
  s.points = uint_or(j, "sweep", "points", s.points);
  if (!(s.delta_min_ns >= 0.0)) fail("sweep.delta_min_ns", "must be >= 0");
  if (!(s.delta_max_ns > s.delta_min_ns))
    fail("sweep", "delta_max_ns must exceed delta_min_ns");
  if (s.points < 2) fail("sweep.points", "must be >= 2");
  return s;
}

inline OutputConfig parse_outputs(const nlohmann::json& j) {
  require_known(j, "outputs", {"records", "schedule", "summary", "format"});
  OutputConfig o;
  o.records = string_or(j, "outputs", "records", o.records);
  o.schedule = string_or(j, "outputs", "schedule", o.schedule);
  o.summary = string_or(j, "outputs", "summary", o.summary);
  const std::string format = string_or(j, "outputs", "format", "csv");
  if (format == "csv")
    o.format = RecordFormat::Csv;
  else if (format == "json-lines")
    o.format = RecordFormat::JsonLines;
  else
    fail("outputs.format", "must be \"csv\" or \"json-lines\"");
  return o;
}

}  // namespace config_detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using namespace config_detail;
  require_known(j, "document",
                {"schema", "source", "geometry_m", "detector", "scenario",
                 "schedule", "run", "sweep", "oracle", "outputs"});
  const std::string schema = string_or(j, "document", "schema", "");
  if (schema != kConfigSchema)
    fail("document.schema",
         "expected \"" + std::string(kConfigSchema) + '"');

  // absent sections still flow through their parser so defaults apply once
  const nlohmann::json empty = nlohmann::json::object();
  const auto section = [&](const char* key) -> const nlohmann::json& {
    return j.contains(key) ? j.at(key) : empty;
  };

  RunConfig c;
  c.source = parse_source(section("source"));
  c.geometry = parse_geometry(section("geometry_m"));
  c.detector = parse_detector(section("detector"));
  c.scenario = parse_scenario(section("scenario"));
  c.schedule = parse_schedule(section("schedule"));
  c.run = parse_run(section("run"));
  c.sweep = parse_sweep(section("sweep"));
  const auto& o = section("oracle");
  require_known(o, "oracle", {"points_per_sqrt_beta"});
  c.oracle_points_per_width =
      uint_or(o, "oracle", "points_per_sqrt_beta", c.oracle_points_per_width);
  if (c.oracle_points_per_width < 64)
    fail("oracle.points_per_sqrt_beta", "must be >= 64");
  c.outputs = parse_outputs(section("outputs"));
  return c;
}

inline RunConfig parse_config(std::istream& is) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace qtw
