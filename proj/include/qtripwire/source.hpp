#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qtripwire/errors.hpp"
#include "qtripwire/rng.hpp"
#include "qtripwire/units.hpp"

// Heralded single-photon source: a cw-pumped downconverter whose idler arm is
// spectrally filtered and detected. Each idler click heralds one signal photon
// injected into the interferometer as a Gaussian wavepacket.
//
// The wavepacket is characterised by a single width parameter
//
//   beta = 1/sigma^2 - gamma * (L*J)^2 / 4        [ns^2]
//
// where sigma is the idler filter bandwidth, L the crystal length, J the
// signal/idler group-velocity mismatch and gamma the quadratic coefficient of
// the Gaussian approximation to the crystal's sinc phase-matching profile.

namespace qtw {

struct SourceParams {
  double pump_frequency = 0.0;           // cycles/ns
  double idler_bandwidth = 0.0;          // sigma, cycles/ns
  double crystal_length_mm = 0.0;        // L
  double group_velocity_mismatch = 0.0;  // J, ns/mm
  double sinc_gaussian_factor = 0.193;   // gamma
  double herald_rate_per_ns = 0.0;       // lambda, raw idler click rate
};

inline double derive_beta(double idler_bandwidth, double crystal_length_mm,
                          double group_velocity_mismatch,
                          double sinc_gaussian_factor) {
  if (idler_bandwidth <= 0.0)
    throw std::invalid_argument("idler bandwidth must be positive");
  const double lj = crystal_length_mm * group_velocity_mismatch;
  const double beta =
      1.0 / (idler_bandwidth * idler_bandwidth) - sinc_gaussian_factor * lj * lj / 4.0;
  if (beta <= 0.0)
    throw NonPositiveBeta(
        "crystal dispersion cancels the filter bandwidth: beta <= 0");
  return beta;
}

inline double derive_beta(const SourceParams& p) {
  return derive_beta(p.idler_bandwidth, p.crystal_length_mm,
                     p.group_velocity_mismatch, p.sinc_gaussian_factor);
}

// Arrival-time offset of the heralded wavepacket centre relative to the
// herald; the long arm's delay line is trimmed by this amount when
// centre compensation is on.
inline double compensation_delay_ns(double crystal_length_mm,
                                    double group_velocity_mismatch) {
  return -crystal_length_mm * group_velocity_mismatch /
         (4.0 * std::numbers::pi);
}

inline double compensation_delay_ns(const SourceParams& p) {
  return compensation_delay_ns(p.crystal_length_mm, p.group_velocity_mismatch);
}

// Amplitude normalisation of the Gaussian temporal mode, (2*beta/pi)^(1/4).
inline double normalization_constant(double beta) {
  if (beta <= 0.0) throw NonPositiveBeta("beta must be positive");
  return std::pow(2.0 * beta / std::numbers::pi, 0.25);
}

// Photon flux |psi(t)|^2 of a wavepacket centred at t_center. Integrates to 1
// over the real line; peak value sqrt(2*pi/beta).
inline double temporal_intensity(double beta, double t_center, double t) {
  if (beta <= 0.0) throw NonPositiveBeta("beta must be positive");
  const double u = t - t_center;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return std::sqrt(2.0 * std::numbers::pi / beta) *
         std::exp(-2.0 * pi2 * u * u / beta);
}

struct HeraldEvent {
  std::uint64_t index = 0;  // ordinal among kept heralds
  double time_ns = 0.0;
};

// Poisson herald arrivals at herald_rate_per_ns over [0, duration_ns),
// thinned by detector dead time: an arrival is kept only if it falls at
// least sqrt(beta) after the immediately preceding arrival (kept or not);
// the first arrival is always kept. Kept events therefore remain at least
// sqrt(beta) apart, so each heralded wavepacket can be treated alone.
inline std::vector<HeraldEvent> sample_heralds(const SourceParams& p,
                                               double duration_ns,
                                               std::uint64_t seed) {
  if (duration_ns < 0.0)
    throw std::invalid_argument("duration must be non-negative");
  if (p.herald_rate_per_ns <= 0.0)
    throw std::invalid_argument("herald rate must be positive");
  const double min_gap = std::sqrt(derive_beta(p));

  std::mt19937_64 gen(seed);
  std::vector<HeraldEvent> kept;
  double t = 0.0;
  bool first = true;
  std::uint64_t index = 0;
  for (;;) {
    const double gap = exponential_gap(gen, p.herald_rate_per_ns);
    t += gap;
    if (t >= duration_ns) break;
    if (first || gap >= min_gap) kept.push_back({index++, t});
    first = false;
  }
  return kept;
}

}  // namespace qtw
