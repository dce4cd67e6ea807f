#pragma once

// Internal unit system: time in ns, length in mm, frequency in cycles/ns
// (ordinary frequency, not angular). Geometry enters in metres and
// wavelengths in nm at the configuration boundary only.

namespace qtw::units {

inline constexpr double c_m_per_ns = 0.299792458;
inline constexpr double c_mm_per_ns = 299.792458;

constexpr double transit_time_ns(double length_m) {
  return length_m / c_m_per_ns;
}

constexpr double wavelength_nm_to_mm(double nm) { return nm * 1e-6; }

// cycles/ns of light with the given vacuum wavelength
constexpr double frequency_from_wavelength_nm(double nm) {
  return c_mm_per_ns / wavelength_nm_to_mm(nm);
}

constexpr double wavelength_nm_from_frequency(double cycles_per_ns) {
  return c_mm_per_ns / cycles_per_ns * 1e6;
}

}  // namespace qtw::units
