#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <variant>

#include "qtripwire/errors.hpp"
#include "qtripwire/units.hpp"

// Balanced four-arm Mach-Zehnder perimeter. A heralded wavepacket enters the
// first beam splitter; one route runs straight down the fence arm, the other
// around the three guarded sides through two corner phase modulators. Closed
// forms below give the expected count per herald inside a detection window at
// each output port, for normal operation and for each intrusion scenario.

namespace qtw {

struct PortCounts {
  double w1 = 0.0;  // bright port under normal operation
  double w2 = 0.0;
};

// Perimeter arm lengths in metres; bottom is the fence arm, the photon's
// other route is left -> top -> right.
struct PerimeterGeometry {
  double left_m = 0.0;
  double top_m = 0.0;
  double right_m = 0.0;
  double bottom_m = 0.0;

  double transit_left_ns() const { return units::transit_time_ns(left_m); }
  double transit_top_ns() const { return units::transit_time_ns(top_m); }
  double transit_right_ns() const { return units::transit_time_ns(right_m); }
  double transit_bottom_ns() const { return units::transit_time_ns(bottom_m); }

  double corner_route_transit_ns() const {
    return units::transit_time_ns(left_m + top_m + right_m);
  }
  // arrival-time lead of the corner route over the fence arm
  double imbalance_ns() const {
    return corner_route_transit_ns() - transit_bottom_ns();
  }
  // normal operation requires the two routes to match in length
  bool balanced(double rel_tol = 1e-12) const {
    return std::fabs(left_m + top_m + right_m - bottom_m) <=
           rel_tol * bottom_m;
  }
};

inline PerimeterGeometry validated(PerimeterGeometry g) {
  if (g.left_m <= 0.0 || g.top_m <= 0.0 || g.right_m <= 0.0 ||
      g.bottom_m <= 0.0)
    throw std::invalid_argument("perimeter arm lengths must be positive");
  return g;
}

// Counting window of width resolving_time_ns centred on the expected arrival
// t_j + t_B of the herald-j wavepacket. Infinite width = count everything.
struct DetectorWindow {
  double resolving_time_ns = 0.0;
};

inline DetectorWindow validated(DetectorWindow w) {
  if (!(w.resolving_time_ns > 0.0))  // rejects NaN too
    throw std::invalid_argument("resolving time must be positive");
  return w;
}

// --- intrusion scenarios ---------------------------------------------------

struct Normal {};

// fence arm obstructed: the straight route is absorbed entirely
struct Block {};

// intruder re-routes the fence arm, adding flight time delta and the phase
// accumulated over the extra path; xi defaults to 2 pi c delta / lambda at
// the given wavelength (0 = use the pump wavelength) unless overridden
struct SideIntrusion {
  double delta_ns = 0.0;
  std::optional<double> xi_override_rad;
  double xi_wavelength_nm = 0.0;
};

enum class Corner { First, Second };

// intruder bridges one corner modulator with their own phase
struct CrossIntrusion {
  double phi_int_rad = 0.0;
  Corner corner = Corner::First;
};

// intruder measures the photon mid-flight and resends a fresh one
struct InterceptResend {};

using Scenario =
    std::variant<Normal, Block, SideIntrusion, CrossIntrusion, InterceptResend>;

inline double wrap_two_pi(double x) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double r = std::fmod(x, two_pi);
  return r < 0.0 ? r + two_pi : r;
}

// --- closed-form windowed counts -------------------------------------------

namespace detail {
inline void require_beta_window(double beta, DetectorWindow w) {
  if (beta <= 0.0) throw NonPositiveBeta("beta must be positive");
  if (!(w.resolving_time_ns > 0.0))
    throw std::invalid_argument("resolving time must be positive");
}
}  // namespace detail

// Fraction of a unit wavepacket, centred centre_offset_ns away from the
// window centre, that falls inside the window.
inline double windowed_fraction(double beta, DetectorWindow window,
                                double centre_offset_ns = 0.0) {
  detail::require_beta_window(beta, window);
  const double s = std::sqrt(2.0 * beta);
  const double tr = window.resolving_time_ns;
  const double c = centre_offset_ns;
  return 0.5 * (std::erf(std::numbers::pi * (tr - 2.0 * c) / s) +
                std::erf(std::numbers::pi * (tr + 2.0 * c) / s));
}

// Normal operation, bright port: I0 = Erf(T_R pi / sqrt(2 beta)).
inline double window_count_normal(double beta, DetectorWindow window) {
  detail::require_beta_window(beta, window);
  return std::erf(window.resolving_time_ns * std::numbers::pi /
                  std::sqrt(2.0 * beta));
}

// Fence arm absorbed: the surviving corner-route amplitude splits equally,
// no interference.
inline PortCounts window_count_block(double i0) {
  if (i0 < 0.0 || i0 > 1.0)
    throw std::invalid_argument("window count must lie in [0, 1]");
  return {i0 / 4.0, i0 / 4.0};
}

// Phase accumulated by light covering delta_ns of extra path: 2 pi c delta /
// lambda. Full (unwrapped) value; wrap_two_pi for reporting.
inline double xi_from_delta(double delta_ns, double wavelength_nm) {
  if (delta_ns < 0.0) throw std::invalid_argument("delta must be >= 0");
  if (wavelength_nm <= 0.0)
    throw std::invalid_argument("wavelength must be positive");
  return 2.0 * std::numbers::pi * delta_ns *
         units::frequency_from_wavelength_nm(wavelength_nm);
}

// Core two-route interference count. The two route envelopes reach the
// window centre offset by envelope_offset and envelope_offset + separation;
// the carrier (at half the pump frequency) turns the separation into a
// phase pi * separation * omega_p, against which the explicit route phase
// relative_phase competes.
//
//   w1,w2 = (1/4)[W(c) + W(c+D)]
//           +/- (1/2) e^{-pi^2 D^2 / 2 beta} cos(pi D omega_p - chi) W(c+D/2)
inline PortCounts two_path_window_counts(double beta, double omega_p,
                                         double separation_ns,
                                         double relative_phase_rad,
                                         DetectorWindow window,
                                         double envelope_offset_ns = 0.0) {
  detail::require_beta_window(beta, window);
  const double c = envelope_offset_ns;
  const double d = separation_ns;
  const double direct =
      0.25 * (windowed_fraction(beta, window, c) +
              windowed_fraction(beta, window, c + d));
  const double overlap =
      std::exp(-std::numbers::pi * std::numbers::pi * d * d / (2.0 * beta));
  const double cross =
      0.5 * overlap *
      std::cos(std::numbers::pi * d * omega_p - relative_phase_rad) *
      windowed_fraction(beta, window, c + 0.5 * d);
  return {direct + cross, direct - cross};
}

// Side intrusion: extra flight time delta on the corner route, extra route
// phase xi. Written out in the Erf-difference form; the cosine term carries
// the interference and flips sign between the ports.
inline PortCounts window_count_side_intrusion(double delta_ns, double xi_rad,
                                              double beta, double omega_p,
                                              DetectorWindow window) {
  detail::require_beta_window(beta, window);
  if (delta_ns < 0.0) throw std::invalid_argument("delta must be >= 0");
  const double pi = std::numbers::pi;
  const double s = std::sqrt(2.0 * beta);
  const double tr = window.resolving_time_ns;
  const double i0 = window_count_normal(beta, window);
  const double e2 = std::erf(pi * (2.0 * delta_ns + tr) / s) -
                    std::erf(pi * (2.0 * delta_ns - tr) / s);
  const double e1 = std::erf(pi * (delta_ns + tr) / s) -
                    std::erf(pi * (delta_ns - tr) / s);
  const double envelope =
      std::exp(-pi * pi * delta_ns * delta_ns / (2.0 * beta));
  const double cosine = std::cos(pi * delta_ns * omega_p - xi_rad);
  const double cross = 2.0 * envelope * cosine * e1;
  return {0.125 * (2.0 * i0 + e2 + cross), 0.125 * (2.0 * i0 + e2 - cross)};
}

// Corner bridged with phase phi_int against the modulator phase phi_1 it
// bypasses; envelopes stay matched, only the phase beats.
inline PortCounts window_count_cross_intrusion(double phi_int_rad,
                                               double phi1_rad, double beta,
                                               DetectorWindow window) {
  const double i0 = window_count_normal(beta, window);
  const double c = std::cos(phi_int_rad - phi1_rad);
  return {0.5 * i0 * (1.0 + c), 0.5 * i0 * (1.0 - c)};
}

// Average bright-port fraction over a uniformly random intruder phase.
inline double cross_intrusion_phase_average() { return 0.5; }

// Resent photon enters the final splitter from one input: a fair coin.
inline PortCounts window_count_intercept_resend(double i0) {
  if (i0 < 0.0 || i0 > 1.0)
    throw std::invalid_argument("window count must lie in [0, 1]");
  return {i0 / 2.0, i0 / 2.0};
}

// --- two simultaneous heralds ----------------------------------------------

struct TwoPhotonCount {
  double count_w1 = 0.0;
  // separation sits near an integer multiple of delta: an intruder timing
  // photons to shadow each other would look like this, so reports call it out
  bool adversarial_spacing = false;
};

// Two wavepackets far enough apart carry no cross term: the expected count
// is the sum of the single-herald counts in each herald's own window. The
// route-phase xi follows from delta at the pump wavelength implied by
// omega_p.
inline TwoPhotonCount two_photon_window_count(double t_j_ns, double t_k_ns,
                                              double delta_ns, double beta,
                                              double omega_p,
                                              DetectorWindow window) {
  detail::require_beta_window(beta, window);
  const double sep = std::fabs(t_j_ns - t_k_ns);
  const double width = std::sqrt(beta);
  if (sep < width)
    throw HeraldsTooClose("heralds closer than one wavepacket width");

  const double xi = 2.0 * std::numbers::pi * delta_ns * omega_p;
  const PortCounts single =
      window_count_side_intrusion(delta_ns, xi, beta, omega_p, window);

  TwoPhotonCount out;
  out.count_w1 = 2.0 * single.w1;
  if (delta_ns > 0.0) {
    const double m = std::round(sep / delta_ns);
    out.adversarial_spacing =
        m >= 1.0 && std::fabs(sep - m * delta_ns) <= 1e-6;
  }
  return out;
}

}  // namespace qtw
