// Minimal library tour: expected port counts as an intruder's detour delay
// grows, printed as a small table. Mirrors what `qtripwire sweep-delta`
// produces as CSV.

#include <cstdio>

#include "qtripwire/qtripwire.hpp"

int main() {
  using namespace qtw;

  const double beta = 0.01;  // squared wavepacket width, ns^2
  const double omega_p = units::frequency_from_wavelength_nm(400.0);
  const DetectorWindow window{0.1};

  const double i0 = window_count_normal(beta, window);
  std::printf("normal operation: w1 = %.12f, w2 = 0\n\n", i0);
  std::printf("%10s %14s %14s %14s\n", "delta_ns", "w1", "w2", "w1+w2");

  for (int i = 0; i <= 12; ++i) {
    const double delta = 0.025 * i;
    const PortCounts c =
        scenario_window_counts(SideIntrusion{delta}, beta, omega_p, window,
                               0.0, 0.0, PhaseMode::FixedSecret);
    std::printf("%10.3f %14.9f %14.9f %14.9f\n", delta, c.w1, c.w2,
                c.w1 + c.w2);
  }

  std::printf("\nfar plateau sits at i0/4 = %.12f\n", i0 / 4.0);
  return 0;
}
