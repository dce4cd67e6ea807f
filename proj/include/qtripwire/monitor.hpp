#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "qtripwire/detection.hpp"
#include "qtripwire/errors.hpp"
#include "qtripwire/record_io.hpp"
#include "qtripwire/schedule.hpp"

// Alarm layer. Theta = n1/(n1+n2) over a sliding window of heralds guards
// the bright-port fraction; Gamma_i compare per-port click averages against
// a calibrated baseline in units of the ideal normal count. The broadcast
// check replays published phases against recorded outcomes.

namespace qtw {

struct Baseline {
  double p1 = 0.0;
  double p2 = 0.0;
};

// per-port click fractions over an intrusion-free stretch
inline Baseline calibrate(const std::vector<DetectionRecord>& records) {
  if (records.empty())
    throw EmptyCalibration("calibration needs at least one record");
  double n1 = 0.0, n2 = 0.0;
  for (const auto& r : records) {
    n1 += clicked_w1(r.outcome) ? 1.0 : 0.0;
    n2 += clicked_w2(r.outcome) ? 1.0 : 0.0;
  }
  const auto n = static_cast<double>(records.size());
  return {n1 / n, n2 / n};
}

struct AlarmConfig {
  double nu = 0.9;        // alarm when theta < nu
  double epsilon1 = 0.1;  // alarm when |gamma1| >= epsilon1
  double epsilon2 = 0.1;
  std::size_t window = 1000;  // heralds per evaluation window
};

inline AlarmConfig validated(AlarmConfig c) {
  if (!(c.nu > 0.0 && c.nu <= 1.0))
    throw std::invalid_argument("nu must lie in (0, 1]");
  if (!(c.epsilon1 >= 0.0) || !(c.epsilon2 >= 0.0))
    throw std::invalid_argument("epsilons must be >= 0");
  if (c.window < 1) throw std::invalid_argument("window must be >= 1");
  return c;
}

class MonitorState {
 public:
  MonitorState(std::size_t window, Baseline baseline, double i0)
      : window_(window), baseline_(baseline), i0_(i0) {
    if (window_ < 1) throw std::invalid_argument("window must be >= 1");
    if (!(i0_ > 0.0)) throw std::invalid_argument("i0 must be positive");
  }

  void update(const DetectionRecord& r) {
    const bool c1 = clicked_w1(r.outcome);
    const bool c2 = clicked_w2(r.outcome);
    recent_.push_back({c1, c2});
    n1_ += c1 ? 1 : 0;
    n2_ += c2 ? 1 : 0;
    if (recent_.size() > window_) {
      const auto [o1, o2] = recent_.front();
      recent_.pop_front();
      n1_ -= o1 ? 1 : 0;
      n2_ -= o2 ? 1 : 0;
    }
    ++processed_;
  }

  std::size_t window_size() const { return window_; }
  std::uint64_t processed() const { return processed_; }
  std::size_t span() const { return recent_.size(); }
  std::uint64_t n1() const { return n1_; }
  std::uint64_t n2() const { return n2_; }
  const Baseline& baseline() const { return baseline_; }
  double i0() const { return i0_; }

  // bright-port fraction; undefined until something clicks
  std::optional<double> theta() const {
    const double total = static_cast<double>(n1_ + n2_);
    if (total == 0.0) return std::nullopt;
    return static_cast<double>(n1_) / total;
  }

  // calibrated-minus-measured click average, in units of i0
  double gamma1() const { return gamma(baseline_.p1, n1_); }
  double gamma2() const { return gamma(baseline_.p2, n2_); }

 private:
  double gamma(double expected, std::uint64_t n) const {
    if (recent_.empty()) return 0.0;
    const double measured =
        static_cast<double>(n) / static_cast<double>(recent_.size());
    return (expected - measured) / i0_;
  }

  std::size_t window_;
  Baseline baseline_;
  double i0_;
  std::deque<std::pair<bool, bool>> recent_;
  std::uint64_t n1_ = 0;
  std::uint64_t n2_ = 0;
  std::uint64_t processed_ = 0;
};

struct AlarmDecision {
  bool alarm = false;
  std::vector<std::string> reasons;
};

inline AlarmDecision evaluate_alarm(const MonitorState& state,
                                    const AlarmConfig& config) {
  validated(config);
  if (config.window != state.window_size())
    throw std::invalid_argument("alarm config window differs from the state's");
  if (state.processed() < state.window_size())
    throw InsufficientData("monitor has not seen a full window yet");

  AlarmDecision d;
  const auto theta = state.theta();
  if (!theta.has_value()) {
    d.reasons.emplace_back("no-clicks");  // total signal loss
  } else if (*theta < config.nu) {
    d.reasons.emplace_back("theta");
  }
  if (std::fabs(state.gamma1()) >= config.epsilon1)
    d.reasons.emplace_back("gamma1");
  if (std::fabs(state.gamma2()) >= config.epsilon2)
    d.reasons.emplace_back("gamma2");
  d.alarm = !d.reasons.empty();
  return d;
}

// Port the photon must exit when nothing interferes with the perimeter:
// matching binary phases keep the bright port, differing ones flip it.
inline Outcome expected_port(double phi1, double phi2) {
  if (!is_binary_phase(phi1) || !is_binary_phase(phi2))
    throw NonBinaryPhase("expected_port needs phases in {0, pi}");
  const bool flip1 = std::fabs(phi1) > 1.0;  // pi, not 0
  const bool flip2 = std::fabs(phi2) > 1.0;
  return flip1 == flip2 ? Outcome::W1 : Outcome::W2;
}

// Under random binary phases the bright port alternates per herald, so the
// monitor judges clicks relative to the port the schedule predicts: swap the
// two single-port outcomes whenever W2 is the expected one. A normally
// operating perimeter then looks identical to the fixed-phase case.
inline Outcome align_to_expected(Outcome o, double phi1, double phi2) {
  if (expected_port(phi1, phi2) == Outcome::W1) return o;
  if (o == Outcome::W1) return Outcome::W2;
  if (o == Outcome::W2) return Outcome::W1;
  return o;
}

enum class VerdictStatus { Pass, Fail, InsufficientData };

inline std::string_view verdict_name(VerdictStatus v) {
  switch (v) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::InsufficientData: return "insufficient-data";
  }
  throw std::invalid_argument("unknown verdict");
}

struct BroadcastVerdict {
  VerdictStatus status = VerdictStatus::InsufficientData;
  std::optional<double> match_fraction;
  std::uint64_t matched = 0;
  std::uint64_t clicked = 0;
  double threshold = 1.0;
};

// Replay the published schedule against recorded outcomes. Only W1/W2
// records carry port information; the default acceptance threshold sits
// three binomial sigma (at the adversary's p = 1/2) below a perfect match.
inline BroadcastVerdict verify_broadcast(
    const std::vector<DetectionRecord>& records, const PhaseSchedule& schedule,
    std::optional<double> threshold_override = std::nullopt) {
  std::uint64_t matched = 0, clicked = 0;
  for (const auto& r : records) {
    PhasePair p;
    try {
      p = schedule.at(r.herald_index);
    } catch (const ScheduleExhausted&) {
      throw ScheduleMismatch("schedule does not cover record index " +
                             std::to_string(r.herald_index));
    }
    if (std::fabs(p.phi1 - r.phi1) > 1e-12 ||
        std::fabs(p.phi2 - r.phi2) > 1e-12)
      throw ScheduleMismatch("record phases disagree with the schedule at index " +
                             std::to_string(r.herald_index));
    if (r.outcome != Outcome::W1 && r.outcome != Outcome::W2) continue;
    ++clicked;
    matched += r.outcome == expected_port(p.phi1, p.phi2) ? 1 : 0;
  }

  BroadcastVerdict v;
  v.matched = matched;
  v.clicked = clicked;
  if (clicked == 0) {
    v.status = VerdictStatus::InsufficientData;
    v.threshold = threshold_override.value_or(1.0);
    return v;
  }
  v.match_fraction =
      static_cast<double>(matched) / static_cast<double>(clicked);
  v.threshold = threshold_override.has_value()
                    ? *threshold_override
                    : 1.0 - 1.5 / std::sqrt(static_cast<double>(clicked));
  v.status = *v.match_fraction >= v.threshold ? VerdictStatus::Pass
                                              : VerdictStatus::Fail;
  return v;
}

// --- summary -----------------------------------------------------------

struct RunSummary {
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  std::optional<double> theta;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  bool alarm = false;
  std::vector<std::string> reasons;
  std::optional<double> match_fraction;
};

inline RunSummary make_summary(const MonitorState& state,
                               const AlarmDecision& decision,
                               std::optional<double> match_fraction) {
  RunSummary s;
  s.n1 = state.n1();
  s.n2 = state.n2();
  s.theta = state.theta();
  s.gamma1 = state.gamma1();
  s.gamma2 = state.gamma2();
  s.alarm = decision.alarm;
  s.reasons = decision.reasons;
  s.match_fraction = match_fraction;
  return s;
}

inline std::string format_summary_json(const RunSummary& s) {
  std::string out = "{\"n1\":";
  out += std::to_string(s.n1);
  out += ",\"n2\":";
  out += std::to_string(s.n2);
  out += ",\"theta\":";
  out += s.theta ? format_double(*s.theta) : "null";
  out += ",\"gamma1\":";
  out += format_double(s.gamma1);
  out += ",\"gamma2\":";
  out += format_double(s.gamma2);
  out += ",\"alarm\":";
  out += s.alarm ? "true" : "false";
  out += ",\"reasons\":[";
  for (std::size_t i = 0; i < s.reasons.size(); ++i) {
    if (i) out += ',';
    out += '"';
    out += s.reasons[i];
    out += '"';
  }
  out += "],\"match_fraction\":";
  out += s.match_fraction ? format_double(*s.match_fraction) : "null";
  out += '}';
  return out;
}

}  // namespace qtw
