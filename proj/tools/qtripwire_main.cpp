// Command-line front end: analytic tables, delay sweeps, Monte Carlo runs
// with monitoring, and offline broadcast verification.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qtripwire/qtripwire.hpp"

namespace {

using namespace qtw;

// 0 ok, 1 alarm or failed verification, 2 usage/config error, 3 runtime error
constexpr int kExitOk = 0;
constexpr int kExitAlarm = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_format = true) {
  cmd->add_option("--config", opts.config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "override the configured RNG seed");
  cmd->add_option("--out", opts.out_path, "output path (default: see --help)");
  if (with_format)
    cmd->add_option("--format", opts.format,
                    "record serialization: csv or json-lines")
        ->check(CLI::IsMember({"csv", "json-lines"}));
}

RunConfig load_config(const CommonOptions& opts) {
  RunConfig c;
  if (opts.config_path.empty()) {
    nlohmann::json minimal;
    minimal["schema"] = std::string(kConfigSchema);
    c = parse_config(minimal);
  } else {
    c = load_config_file(opts.config_path);
  }
  if (opts.seed) c.run.seed = *opts.seed;
  if (opts.format == "csv") c.outputs.format = RecordFormat::Csv;
  if (opts.format == "json-lines") c.outputs.format = RecordFormat::JsonLines;
  return c;
}

// Streams either to a file (with path diagnostics) or to stdout.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw std::runtime_error("cannot open output file: " + path);
    path_ = path;
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  void finish() {
    if (path_.empty()) return;
    file_.flush();
    if (!file_) throw std::runtime_error("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
};

double relative_deviation(const PortCounts& closed, const PortCounts& oracle) {
  const auto dev = [](double a, double b) {
    return std::fabs(a - b) / std::max(std::fabs(a), 1e-9);
  };
  return std::max(dev(closed.w1, oracle.w1), dev(closed.w2, oracle.w2));
}

int cmd_analytic(const CommonOptions& opts) {
  const RunConfig c = load_config(opts);
  const RunPhysics physics = make_run_physics(c);
  const double phi1 = c.schedule.phi1_rad;
  const double phi2 = c.schedule.phi2_rad;

  OutputTarget target(opts.out_path);
  auto& os = target.stream();

  os << "scenario,parameter,count_w1,count_w2,oracle_w1,oracle_w2,"
        "rel_deviation\n";

  double max_dev = 0.0;
  const auto emit = [&](const std::string& label, const std::string& parameter,
                        const Scenario& scenario) {
    const PortCounts closed = scenario_window_counts(
        scenario, physics.beta, physics.omega_p, c.detector.window, phi1, phi2,
        PhaseMode::FixedSecret, physics.envelope_offset_ns);
    const PortCounts oracle = numeric_window_count(
        scenario, physics.beta, physics.omega_p, c.geometry, c.detector.window,
        c.oracle_points_per_width, phi1, phi2, PhaseMode::FixedSecret,
        physics.envelope_offset_ns);
    const double dev = relative_deviation(closed, oracle);
    max_dev = std::max(max_dev, dev);
    os << label << ',' << parameter << ',' << format_double(closed.w1) << ','
       << format_double(closed.w2) << ',' << format_double(oracle.w1) << ','
       << format_double(oracle.w2) << ',' << format_double(dev) << '\n';
  };

  emit("normal", "", Normal{});
  emit("block", "", Block{});
  for (std::size_t i = 0; i < c.sweep.points; ++i) {
    const double delta =
        c.sweep.delta_min_ns + (c.sweep.delta_max_ns - c.sweep.delta_min_ns) *
                                   static_cast<double>(i) /
                                   static_cast<double>(c.sweep.points - 1);
    emit("side-intrusion", format_double(delta), SideIntrusion{delta});
  }
  constexpr int kPhiPoints = 16;
  for (int i = 0; i < kPhiPoints; ++i) {
    const double phi_int = 2.0 * std::numbers::pi * i / kPhiPoints;
    emit("cross-intrusion", format_double(phi_int),
         CrossIntrusion{phi_int, Corner::First});
  }
  emit("intercept-resend", "", InterceptResend{});

  os << "max_rel_deviation," << format_double(max_dev) << '\n';
  target.finish();
  return kExitOk;
}

int cmd_sweep_delta(const CommonOptions& opts) {
  const RunConfig c = load_config(opts);
  const RunPhysics physics = make_run_physics(c);
  const double phi1 = c.schedule.phi1_rad;
  const double phi2 = c.schedule.phi2_rad;

  OutputTarget target(opts.out_path);
  auto& os = target.stream();

  os << "delta_ns,xi_rad,count_w1,count_w2,count_total,oracle_w1\n";
  for (std::size_t i = 0; i < c.sweep.points; ++i) {
    const double delta =
        c.sweep.delta_min_ns + (c.sweep.delta_max_ns - c.sweep.delta_min_ns) *
                                   static_cast<double>(i) /
                                   static_cast<double>(c.sweep.points - 1);
    const SideIntrusion si{delta};
    const double xi = resolve_xi(si, physics.omega_p);
    const PortCounts closed = scenario_window_counts(
        si, physics.beta, physics.omega_p, c.detector.window, phi1, phi2,
        PhaseMode::FixedSecret, physics.envelope_offset_ns);
    const PortCounts oracle = numeric_window_count(
        si, physics.beta, physics.omega_p, c.geometry, c.detector.window,
        c.oracle_points_per_width, phi1, phi2, PhaseMode::FixedSecret,
        physics.envelope_offset_ns);
    os << format_double(delta) << ',' << format_double(xi) << ','
       << format_double(closed.w1) << ',' << format_double(closed.w2) << ','
       << format_double(closed.w1 + closed.w2) << ','
       << format_double(oracle.w1) << '\n';
  }
  target.finish();
  return kExitOk;
}

// Heralds for a calibration block: enough Poisson time that falling short of
// the requested count is a many-sigma fluke, then truncate exactly.
std::vector<HeraldEvent> calibration_heralds(const SourceParams& source,
                                             std::uint64_t count,
                                             std::uint64_t seed) {
  const double beta = derive_beta(source);
  const double kept_rate = source.herald_rate_per_ns *
                           std::exp(-source.herald_rate_per_ns *
                                    std::sqrt(beta));
  const double duration =
      (1.25 * static_cast<double>(count) + 25.0) / kept_rate;
  auto heralds = sample_heralds(source, duration, seed);
  if (heralds.size() < count)
    throw std::runtime_error(
        "calibration run produced too few heralds; increase "
        "run.calibration_heralds margin or the herald rate");
  heralds.resize(count);
  return heralds;
}

void write_records_file(const std::string& path,
                        const std::vector<DetectionRecord>& records,
                        RecordFormat format) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  write_records(os, records, format);
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_schedule_file(const std::string& path, const PhaseSchedule& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  write_schedule(os, s);
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
}

int cmd_simulate(const CommonOptions& opts) {
  RunConfig c = load_config(opts);
  if (!opts.out_path.empty()) c.outputs.records = opts.out_path;
  const RunPhysics physics = make_run_physics(c);
  const double i0 = window_count_normal(physics.beta, c.detector.window);
  const bool qrng = c.schedule.mode == PhaseMode::QrngBinary;

  // seed streams: 1 calibration heralds, 2 its run, 3 its schedule,
  //               4 main heralds, 5 main run, 6 main schedule
  const std::uint64_t seed = c.run.seed;

  // calibration: a known-good perimeter under the operating phase mode
  const auto cal_heralds =
      calibration_heralds(c.source, c.run.calibration_heralds,
                          derive_seed(seed, 1));
  const PhaseSchedule cal_schedule =
      qrng ? PhaseSchedule::qrng(cal_heralds.size(), derive_seed(seed, 3))
           : PhaseSchedule::fixed(c.schedule.phi1_rad, c.schedule.phi2_rad);
  const auto cal_records = simulate_run(Normal{}, cal_heralds, cal_schedule,
                                        c.detector, physics,
                                        derive_seed(seed, 2));

  const auto aligned = [&](const DetectionRecord& r) {
    return qrng ? align_to_expected(r.outcome, r.phi1, r.phi2) : r.outcome;
  };

  std::vector<DetectionRecord> cal_view = cal_records;
  for (auto& r : cal_view) r.outcome = aligned(r);
  const Baseline baseline = calibrate(cal_view);

  // monitored run
  const auto heralds =
      sample_heralds(c.source, c.run.duration_ns, derive_seed(seed, 4));
  const PhaseSchedule schedule =
      qrng ? PhaseSchedule::qrng(heralds.size(), derive_seed(seed, 6),
                                 c.schedule.broadcast_delay_ns)
           : PhaseSchedule::fixed(c.schedule.phi1_rad, c.schedule.phi2_rad,
                                  c.schedule.broadcast_delay_ns);
  const auto records = simulate_run(c.scenario, heralds, schedule, c.detector,
                                    physics, derive_seed(seed, 5));

  MonitorState state(c.run.alarm.window, baseline, i0);
  for (const auto& r : records) {
    DetectionRecord aligned_record = r;
    aligned_record.outcome = aligned(r);
    state.update(aligned_record);
  }
  const AlarmDecision decision = evaluate_alarm(state, c.run.alarm);

  std::optional<double> match_fraction;
  bool broadcast_failed = false;
  if (qrng) {
    const BroadcastVerdict verdict = verify_broadcast(records, schedule);
    match_fraction = verdict.match_fraction;
    if (verdict.status == VerdictStatus::Fail) {
      broadcast_failed = true;
      std::cerr << "broadcast verification failed: match_fraction="
                << format_double(*verdict.match_fraction)
                << " threshold=" << format_double(verdict.threshold) << '\n';
    }
  }

  write_records_file(c.outputs.records, records, c.outputs.format);
  write_schedule_file(c.outputs.schedule, schedule);

  const RunSummary summary = make_summary(state, decision, match_fraction);
  const std::string line = format_summary_json(summary);
  {
    std::ofstream os(c.outputs.summary);
    if (!os) throw std::runtime_error("cannot open output file: " +
                                      c.outputs.summary);
    os << line << '\n';
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + c.outputs.summary);
  }
  std::cout << line << '\n';

  return decision.alarm || broadcast_failed ? kExitAlarm : kExitOk;
}

int cmd_verify_broadcast(const std::string& records_path,
                         const std::string& schedule_path) {
  std::ifstream records_in(records_path);
  if (!records_in)
    throw std::runtime_error("cannot open record file: " + records_path);
  const auto records = read_records(records_in);

  std::ifstream schedule_in(schedule_path);
  if (!schedule_in)
    throw std::runtime_error("cannot open schedule file: " + schedule_path);
  const auto schedule = read_schedule(schedule_in);

  const BroadcastVerdict v = verify_broadcast(records, schedule);
  std::cout << "match_fraction="
            << (v.match_fraction ? format_double(*v.match_fraction) : "n/a")
            << " matched=" << v.matched << " clicked=" << v.clicked
            << " threshold=" << format_double(v.threshold)
            << " status=" << verdict_name(v.status) << '\n';

  switch (v.status) {
    case VerdictStatus::Pass: return kExitOk;
    case VerdictStatus::Fail: return kExitAlarm;
    case VerdictStatus::InsufficientData: return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mach-Zehnder perimeter tripwire simulator"};
  app.require_subcommand(1);

  CommonOptions analytic_opts;
  auto* analytic = app.add_subcommand(
      "analytic", "expected counts for every scenario, closed form vs oracle");
  add_common(analytic, analytic_opts, false);

  CommonOptions sweep_opts;
  auto* sweep = app.add_subcommand(
      "sweep-delta", "port counts across a side-intrusion delay grid (CSV)");
  add_common(sweep, sweep_opts, false);

  CommonOptions sim_opts;
  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo run with monitoring and broadcast checks");
  add_common(simulate, sim_opts);

  std::string records_path, schedule_path;
  auto* verify = app.add_subcommand(
      "verify-broadcast", "replay a schedule file against recorded outcomes");
  verify->add_option("records", records_path, "record file (csv or json-lines)")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("schedule", schedule_path, "published schedule file")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analytic->parsed()) return cmd_analytic(analytic_opts);
    if (sweep->parsed()) return cmd_sweep_delta(sweep_opts);
    if (simulate->parsed()) return cmd_simulate(sim_opts);
    if (verify->parsed())
      return cmd_verify_broadcast(records_path, schedule_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
