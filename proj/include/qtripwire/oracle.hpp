#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "qtripwire/interferometer.hpp"
#include "qtripwire/scenario.hpp"
#include "qtripwire/schedule.hpp"

// Brute-force check on the closed forms: superpose delayed, phase-shifted
// copies of the wavepacket at each output port, square, and integrate the
// flux over the detection window on a uniform grid. Deliberately shares no
// Erf algebra with interferometer.hpp — only the mode superposition rules.
//
// The optical carrier rides at half the pump frequency and is common to all
// routes, so a route delayed by d contributes a constant carrier phase
// -pi * omega_p * d rather than an oscillation the grid would have to
// resolve.

namespace qtw {

namespace oracle_detail {

struct Route {
  double offset_ns = 0.0;
  std::complex<double> w1;
  std::complex<double> w2;
};

}  // namespace oracle_detail

inline PortCounts numeric_window_count(const Scenario& scenario, double beta,
                                       double omega_p,
                                       const PerimeterGeometry& geometry,
                                       DetectorWindow window,
                                       int points_per_width,
                                       double phi1 = 0.0, double phi2 = 0.0,
                                       PhaseMode mode = PhaseMode::FixedSecret,
                                       double envelope_offset_ns = 0.0) {
  detail::require_beta_window(beta, window);
  if (points_per_width < 64)
    throw GridTooCoarse("need at least 64 grid points per sqrt(beta)");

  const double pi = std::numbers::pi;
  const double width = std::sqrt(beta);
  const double imbalance = geometry.imbalance_ns();
  const double compensated = mode == PhaseMode::FixedSecret ? phi1 + phi2 : 0.0;
  const double c = envelope_offset_ns;

  std::vector<oracle_detail::Route> routes;
  const auto add_route = [&](double offset, double chi, double a1, double a2) {
    const std::complex<double> ph = std::polar(1.0, chi - pi * omega_p * offset);
    routes.push_back({offset, a1 * ph, a2 * ph});
  };
  const auto add_fence = [&]() { add_route(c, compensated, 0.5, -0.5); };

  if (std::holds_alternative<Normal>(scenario)) {
    add_fence();
    add_route(c + imbalance, phi1 + phi2, 0.5, 0.5);
  } else if (std::holds_alternative<Block>(scenario)) {
    add_route(c + imbalance, phi1 + phi2, 0.5, 0.5);
  } else if (const auto* si = std::get_if<SideIntrusion>(&scenario)) {
    add_fence();
    add_route(c + imbalance + si->delta_ns, phi1 + phi2 + resolve_xi(*si, omega_p),
              0.5, 0.5);
  } else if (const auto* ci = std::get_if<CrossIntrusion>(&scenario)) {
    add_fence();
    const double route_phase = ci->corner == Corner::First
                                   ? ci->phi_int_rad + phi2
                                   : phi1 + ci->phi_int_rad;
    add_route(c + imbalance, route_phase, 0.5, 0.5);
  } else {  // InterceptResend: one full photon into one splitter input
    add_route(c, 0.0, std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0);
  }

  double lo, hi;
  if (std::isinf(window.resolving_time_ns)) {
    auto [mn, mx] = std::minmax_element(
        routes.begin(), routes.end(),
        [](const auto& a, const auto& b) { return a.offset_ns < b.offset_ns; });
    lo = mn->offset_ns - 6.0 * width;
    hi = mx->offset_ns + 6.0 * width;
  } else {
    lo = -0.5 * window.resolving_time_ns;
    hi = 0.5 * window.resolving_time_ns;
  }

  const auto n = static_cast<std::size_t>(
      std::max(2.0, std::ceil((hi - lo) / width * points_per_width)));
  const double h = (hi - lo) / static_cast<double>(n);

  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = lo + static_cast<double>(i) * h;
    std::complex<double> a1{0.0, 0.0}, a2{0.0, 0.0};
    for (const auto& r : routes) {
      const double x = u - r.offset_ns;
      const double env = std::exp(-pi * pi * x * x / beta);
      a1 += r.w1 * env;
      a2 += r.w2 * env;
    }
    const double wt = (i == 0 || i == n) ? 0.5 : 1.0;
    s1 += wt * std::norm(a1);
    s2 += wt * std::norm(a2);
  }
  const double flux_scale = std::sqrt(2.0 * pi / beta) * h;
  return {flux_scale * s1, flux_scale * s2};
}

}  // namespace qtw
