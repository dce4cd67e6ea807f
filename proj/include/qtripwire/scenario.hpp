#pragma once

#include "qtripwire/interferometer.hpp"
#include "qtripwire/schedule.hpp"
#include "qtripwire/units.hpp"

// Per-herald expected counts for any scenario under concrete modulator
// phases. The closed forms in interferometer.hpp cover the canonical
// (compensated, phase-free) cases; this dispatcher supplies the general
// ones the detector simulation samples from.

namespace qtw {

// xi for a side intrusion: explicit override, or accumulated phase over the
// detour at the configured wavelength (0 = the pump wavelength behind
// omega_p).
inline double resolve_xi(const SideIntrusion& si, double omega_p) {
  if (si.xi_override_rad) return *si.xi_override_rad;
  const double lambda_nm = si.xi_wavelength_nm > 0.0
                               ? si.xi_wavelength_nm
                               : units::wavelength_nm_from_frequency(omega_p);
  return xi_from_delta(si.delta_ns, lambda_nm);
}

// Expected windowed counts per herald. In FixedSecret mode the receiver
// compensates the known phase sum phi1 + phi2; in QrngBinary mode nothing is
// compensated and the bright port follows cos^2((phi1 + phi2)/2).
// envelope_offset_ns shifts both route envelopes relative to the window
// centre (nonzero when wavepacket-centre compensation is off).
inline PortCounts scenario_window_counts(const Scenario& scenario, double beta,
                                         double omega_p, DetectorWindow window,
                                         double phi1, double phi2,
                                         PhaseMode mode,
                                         double envelope_offset_ns = 0.0) {
  const double compensated =
      mode == PhaseMode::FixedSecret ? phi1 + phi2 : 0.0;
  const double c = envelope_offset_ns;

  if (std::holds_alternative<Normal>(scenario)) {
    return two_path_window_counts(beta, omega_p, 0.0,
                                  (phi1 + phi2) - compensated, window, c);
  }
  if (std::holds_alternative<Block>(scenario)) {
    const double w = windowed_fraction(beta, window, c);
    return {w / 4.0, w / 4.0};
  }
  if (const auto* si = std::get_if<SideIntrusion>(&scenario)) {
    const double xi = resolve_xi(*si, omega_p);
    return two_path_window_counts(beta, omega_p, si->delta_ns,
                                  (phi1 + phi2 + xi) - compensated, window, c);
  }
  if (const auto* ci = std::get_if<CrossIntrusion>(&scenario)) {
    const double route_phase = ci->corner == Corner::First
                                   ? ci->phi_int_rad + phi2
                                   : phi1 + ci->phi_int_rad;
    return two_path_window_counts(beta, omega_p, 0.0,
                                  route_phase - compensated, window, c);
  }
  // InterceptResend: the resent photon hits the final splitter from one port
  const double w = windowed_fraction(beta, window, c);
  return {w / 2.0, w / 2.0};
}

}  // namespace qtw
