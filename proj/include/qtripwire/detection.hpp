#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qtripwire/errors.hpp"
#include "qtripwire/interferometer.hpp"
#include "qtripwire/rng.hpp"
#include "qtripwire/scenario.hpp"
#include "qtripwire/schedule.hpp"
#include "qtripwire/source.hpp"

// Stochastic layer: turns per-herald expected counts into click records.
// Loss is Bernoulli thinning per port; dark counts are independent Bernoulli
// per window per port. A real single photon can never fire both detectors,
// so a Both outcome always involves at least one dark count.

namespace qtw {

enum class Outcome { None, W1, W2, Both };

struct DetectorModel {
  double efficiency_w1 = 1.0;
  double efficiency_w2 = 1.0;
  double dark_count_rate_per_ns = 0.0;
  DetectorWindow window;
};

inline DetectorModel validated(DetectorModel d) {
  if (!(d.efficiency_w1 >= 0.0 && d.efficiency_w1 <= 1.0) ||
      !(d.efficiency_w2 >= 0.0 && d.efficiency_w2 <= 1.0))
    throw std::invalid_argument("detector efficiencies must lie in [0, 1]");
  if (!(d.dark_count_rate_per_ns >= 0.0))
    throw std::invalid_argument("dark count rate must be >= 0");
  validated(d.window);
  return d;
}

// false-click probability per port per window
inline double dark_click_probability(const DetectorModel& d) {
  if (d.dark_count_rate_per_ns == 0.0) return 0.0;
  const double p = d.dark_count_rate_per_ns * d.window.resolving_time_ns;
  if (!(p >= 0.0 && p <= 1.0))
    throw ProbabilityOverflow("dark-count probability outside [0, 1]");
  return p;
}

struct ClickProbabilities {
  double q1 = 0.0;  // photon click at w1
  double q2 = 0.0;
  double dark = 0.0;  // independent per port
};

inline ClickProbabilities click_probabilities(const PortCounts& counts,
                                              const DetectorModel& det) {
  if (!(counts.w1 >= 0.0 && counts.w1 <= 1.0) ||
      !(counts.w2 >= 0.0 && counts.w2 <= 1.0) ||
      counts.w1 + counts.w2 > 1.0 + 1e-12)
    throw ProbabilityOverflow("analytic window counts outside [0, 1]");
  const double q1 = det.efficiency_w1 * counts.w1;
  const double q2 = det.efficiency_w2 * counts.w2;
  return {q1, q2, dark_click_probability(det)};
}

// Everything fixed for one run besides the scenario and the schedule.
struct RunPhysics {
  double beta = 0.0;
  double omega_p = 0.0;              // pump, cycles/ns
  double window_center_offset_ns = 0.0;  // fence-arm transit time
  double envelope_offset_ns = 0.0;   // nonzero when centre compensation is off
};

inline ClickProbabilities click_probabilities(
    const Scenario& scenario, const RunPhysics& physics,
    const DetectorModel& det, double phi1 = 0.0, double phi2 = 0.0,
    PhaseMode mode = PhaseMode::FixedSecret) {
  const PortCounts counts =
      scenario_window_counts(scenario, physics.beta, physics.omega_p,
                             det.window, phi1, phi2, mode,
                             physics.envelope_offset_ns);
  return click_probabilities(counts, det);
}

struct DetectionRecord {
  std::uint64_t herald_index = 0;
  double herald_time_ns = 0.0;
  double window_center_ns = 0.0;  // herald time + fence transit
  Outcome outcome = Outcome::None;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

inline bool clicked_w1(Outcome o) {
  return o == Outcome::W1 || o == Outcome::Both;
}
inline bool clicked_w2(Outcome o) {
  return o == Outcome::W2 || o == Outcome::Both;
}

// One record per herald, in herald order. Three random draws per herald
// (photon port, dark w1, dark w2) whatever the parameters, so streams with
// the same seed stay aligned across configurations.
inline std::vector<DetectionRecord> simulate_run(
    const Scenario& scenario, const std::vector<HeraldEvent>& heralds,
    const PhaseSchedule& schedule, const DetectorModel& detector,
    const RunPhysics& physics, std::uint64_t seed) {
  validated(schedule);
  std::mt19937_64 gen(seed);
  std::vector<DetectionRecord> records;
  records.reserve(heralds.size());
  for (const auto& h : heralds) {
    const PhasePair p = schedule.at(h.index);
    const ClickProbabilities q = click_probabilities(
        scenario, physics, detector, p.phi1, p.phi2, schedule.mode);

    const double u = uniform01(gen);
    const int photon = u < q.q1 ? 1 : (u < q.q1 + q.q2 ? 2 : 0);
    const bool dark1 = bernoulli(gen, q.dark);
    const bool dark2 = bernoulli(gen, q.dark);
    const bool c1 = photon == 1 || dark1;
    const bool c2 = photon == 2 || dark2;

    const Outcome o = c1 && c2   ? Outcome::Both
                      : c1       ? Outcome::W1
                      : c2       ? Outcome::W2
                                 : Outcome::None;
    records.push_back({h.index, h.time_ns,
                       h.time_ns + physics.window_center_offset_ns, o, p.phi1,
                       p.phi2});
  }
  return records;
}

}  // namespace qtw
