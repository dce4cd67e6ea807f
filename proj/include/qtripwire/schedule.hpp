#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qtripwire/errors.hpp"
#include "qtripwire/rng.hpp"

// Corner modulator phases, one pair per herald. Two operating modes:
//
//  - FixedSecret: (phi1, phi2) is a constant shared secret; the receiving
//    station compensates the known sum, so normal operation stays bright at
//    w1 whatever the secret is.
//  - QrngBinary: each herald gets fresh phases drawn from {0, pi}; nobody
//    compensates, and the values are published only broadcast_delay_ns after
//    the photon has been detected.

namespace qtw {

enum class PhaseMode { FixedSecret, QrngBinary };

struct PhasePair {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

struct PhaseSchedule {
  PhaseMode mode = PhaseMode::FixedSecret;
  std::vector<PhasePair> phases;
  double broadcast_delay_ns = 0.0;

  static PhaseSchedule fixed(double phi1, double phi2,
                             double broadcast_delay_ns = 0.0) {
    PhaseSchedule s;
    s.mode = PhaseMode::FixedSecret;
    s.phases = {{phi1, phi2}};
    s.broadcast_delay_ns = broadcast_delay_ns;
    return s;
  }

  static PhaseSchedule qrng(std::size_t n, std::uint64_t seed,
                            double broadcast_delay_ns = 0.0) {
    PhaseSchedule s;
    s.mode = PhaseMode::QrngBinary;
    s.broadcast_delay_ns = broadcast_delay_ns;
    s.phases.reserve(n);
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < n; ++i) {
      const double p1 = bernoulli(gen, 0.5) ? std::numbers::pi : 0.0;
      const double p2 = bernoulli(gen, 0.5) ? std::numbers::pi : 0.0;
      s.phases.push_back({p1, p2});
    }
    return s;
  }

  // phases for herald j; a single-entry schedule repeats forever
  PhasePair at(std::uint64_t j) const {
    if (j < phases.size()) return phases[j];
    if (phases.size() == 1) return phases[0];
    throw ScheduleExhausted("phase schedule shorter than the run");
  }
};

inline bool is_binary_phase(double phi, double tol = 1e-9) {
  return std::fabs(phi) <= tol || std::fabs(phi - std::numbers::pi) <= tol;
}

// QrngBinary schedules must hold only {0, pi}
inline const PhaseSchedule& validated(const PhaseSchedule& s) {
  if (s.mode == PhaseMode::QrngBinary) {
    for (const auto& p : s.phases)
      if (!is_binary_phase(p.phi1) || !is_binary_phase(p.phi2))
        throw NonBinaryPhase("qrng schedule entries must be 0 or pi");
  }
  return s;
}

}  // namespace qtw
