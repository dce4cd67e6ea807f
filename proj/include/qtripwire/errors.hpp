#pragma once

#include <stdexcept>

namespace qtw {

// Wavepacket width parameter came out <= 0: the source parameters describe a
// crystal too long (or too dispersive) for the requested idler bandwidth.
struct NonPositiveBeta : std::domain_error {
  using std::domain_error::domain_error;
};

// Quadrature grid resolves the envelope too poorly to trust the result.
struct GridTooCoarse : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Two heralds landed closer than one wavepacket width; the single-pair
// expressions stop being valid there.
struct HeraldsTooClose : std::domain_error {
  using std::domain_error::domain_error;
};

// Per-window click probability left [0, 1].
struct ProbabilityOverflow : std::logic_error {
  using std::logic_error::logic_error;
};

// Phase schedule ran out of entries before the run did.
struct ScheduleExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Recorded phases or indices disagree with the published phase schedule.
struct ScheduleMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Calibration asked for on an empty record set.
struct EmptyCalibration : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Alarm evaluation requested before the monitor saw a full window.
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Broadcast verification needs phases restricted to {0, pi}.
struct NonBinaryPhase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad or inconsistent configuration file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qtw
