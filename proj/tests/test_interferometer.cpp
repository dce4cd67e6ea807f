#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "qtripwire/interferometer.hpp"
#include "qtripwire/rng.hpp"
#include "qtripwire/scenario.hpp"
#include "qtripwire/schedule.hpp"
#include "support/erf_reference.hpp"

using namespace qtw;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBeta = 0.01;            // sqrt(beta) = 0.1 ns
constexpr double kOmegaP = 749481.145;    // 400 nm pump, cycles/ns
constexpr double kInf = std::numeric_limits<double>::infinity();
const DetectorWindow kWin{0.1};           // T_R = sqrt(beta)

double ref_erf(double x) {
  return static_cast<double>(qtw_test::erf_reference(x));
}

// independent port-sum reference (1/4)[2 I0 + E2]
double ref_port_sum(double delta, double tr, double beta) {
  const double s = std::sqrt(2.0 * beta);
  const double i0 = ref_erf(tr * kPi / s);
  const double e2 =
      ref_erf(kPi * (2.0 * delta + tr) / s) - ref_erf(kPi * (2.0 * delta - tr) / s);
  return 0.25 * (2.0 * i0 + e2);
}

}  // namespace

TEST_CASE("perimeter geometry", "[interferometer]") {
  PerimeterGeometry g{25.0, 50.0, 25.0, 100.0};
  REQUIRE(g.balanced());
  REQUIRE(g.imbalance_ns() == 0.0);
  REQUIRE_THAT(g.transit_bottom_ns(), WithinRel(333.5640951981521, 1e-12));

  PerimeterGeometry longer = g;
  longer.bottom_m = 100.1;
  REQUIRE_FALSE(longer.balanced());
  REQUIRE(longer.imbalance_ns() < 0.0);  // corner route now arrives first

  REQUIRE_THROWS_AS(validated(PerimeterGeometry{0.0, 50.0, 25.0, 100.0}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(validated(PerimeterGeometry{25.0, -1.0, 25.0, 100.0}),
                    std::invalid_argument);
}

TEST_CASE("detector window validation", "[interferometer]") {
  REQUIRE_THROWS_AS(validated(DetectorWindow{0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(validated(DetectorWindow{-0.5}), std::invalid_argument);
  REQUIRE_THROWS_AS(validated(DetectorWindow{std::nan("")}),
                    std::invalid_argument);
  REQUIRE(validated(DetectorWindow{kInf}).resolving_time_ns == kInf);
}

TEST_CASE("normal-operation window count", "[interferometer]") {
  const double i0 = window_count_normal(kBeta, kWin);
  REQUIRE_THAT(i0, WithinAbs(0.9983196836634733, 1e-9));
  REQUIRE_THAT(i0, WithinAbs(ref_erf(kPi / std::numbers::sqrt2), 1e-10));

  REQUIRE(window_count_normal(kBeta, DetectorWindow{kInf}) == 1.0);
  REQUIRE_THAT(window_count_normal(kBeta, DetectorWindow{1e-15}),
               WithinAbs(0.0, 1e-13));

  REQUIRE_THROWS_AS(window_count_normal(0.0, kWin), NonPositiveBeta);
  REQUIRE_THROWS_AS(window_count_normal(-0.01, kWin), NonPositiveBeta);
  REQUIRE_THROWS_AS(window_count_normal(kBeta, DetectorWindow{0.0}),
                    std::invalid_argument);
}

TEST_CASE("blocked fence arm", "[interferometer]") {
  REQUIRE(window_count_block(1.0).w1 == 0.25);
  REQUIRE(window_count_block(1.0).w2 == 0.25);
  REQUIRE(window_count_block(0.0).w1 == 0.0);
  REQUIRE(window_count_block(0.0).w2 == 0.0);

  // half of the input never reaches a detector
  const double i0 = window_count_normal(kBeta, kWin);
  const auto b = window_count_block(i0);
  REQUIRE(b.w1 + b.w2 == i0 / 2.0);

  REQUIRE_THROWS_AS(window_count_block(-0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(window_count_block(1.1), std::invalid_argument);
}

TEST_CASE("xi from added flight time", "[interferometer]") {
  REQUIRE(xi_from_delta(0.0, 400.0) == 0.0);

  // one wavelength of extra path -> one full turn
  const double one_wavelength_ns = 1.3342563807926082e-6;
  REQUIRE_THAT(xi_from_delta(one_wavelength_ns, 400.0),
               WithinRel(2.0 * kPi, 1e-12));

  REQUIRE_THAT(xi_from_delta(0.1, 400.0), WithinRel(470912.8918272133, 1e-12));
  REQUIRE_THAT(wrap_two_pi(xi_from_delta(0.1, 400.0)),
               WithinAbs(0.7194247177, 1e-6));  // 2*pi*0.1145

  REQUIRE_THROWS_AS(xi_from_delta(-0.1, 400.0), std::invalid_argument);
  REQUIRE_THROWS_AS(xi_from_delta(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("side intrusion reduces to normal at the identity", "[interferometer]") {
  const double i0 = window_count_normal(kBeta, kWin);
  const auto id = window_count_side_intrusion(0.0, 0.0, kBeta, kOmegaP, kWin);
  REQUIRE(id.w1 == i0);  // bit-exact reduction
  REQUIRE(id.w2 == 0.0);
}

TEST_CASE("side intrusion at the plateau", "[interferometer]") {
  // two resolving times of detour: interference gone, half the light lost
  const double xi = xi_from_delta(0.2, 400.0);
  const auto c = window_count_side_intrusion(0.2, xi, kBeta, kOmegaP, kWin);
  REQUIRE_THAT(c.w1, WithinAbs(0.2495799209167136, 1e-9));
  REQUIRE_THAT(c.w1, WithinAbs(window_count_normal(kBeta, kWin) / 4.0, 1e-10));
}

TEST_CASE("side intrusion port sum is phase-independent", "[interferometer]") {
  for (double delta : {0.0, 0.03, 0.07, 0.12, 0.2, 0.31}) {
    const double base =
        ref_port_sum(delta, kWin.resolving_time_ns, kBeta);
    for (double xi : {0.0, 1.1, 4.9}) {
      for (double omega : {kOmegaP, 2.0 * kOmegaP}) {
        const auto c =
            window_count_side_intrusion(delta, xi, kBeta, omega, kWin);
        REQUIRE_THAT(c.w1 + c.w2, WithinAbs(base, 1e-9));
      }
    }
  }
}

TEST_CASE("side intrusion plateau flattens beyond the window", "[interferometer]") {
  const double quarter = window_count_normal(kBeta, kWin) / 4.0;
  for (double delta = 0.4; delta <= 1.0; delta += 0.02) {
    const double xi = xi_from_delta(delta, 400.0);
    const auto c = window_count_side_intrusion(delta, xi, kBeta, kOmegaP, kWin);
    REQUIRE_THAT(c.w1, WithinAbs(quarter, 1e-3));
    REQUIRE_THAT(c.w2, WithinAbs(quarter, 1e-3));
  }
}

TEST_CASE("side intrusion rejects negative detours", "[interferometer]") {
  REQUIRE_THROWS_AS(window_count_side_intrusion(-0.1, 0.0, kBeta, kOmegaP, kWin),
                    std::invalid_argument);
}

TEST_CASE("two-path kernel agrees with the side-intrusion form", "[interferometer]") {
  for (double delta : {0.0, 0.05, 0.1, 0.2}) {
    for (double xi : {0.0, 1.0, 4.0}) {
      const auto a = window_count_side_intrusion(delta, xi, kBeta, kOmegaP, kWin);
      const auto b = two_path_window_counts(kBeta, kOmegaP, delta, xi, kWin);
      REQUIRE_THAT(b.w1, WithinAbs(a.w1, 1e-14));
      REQUIRE_THAT(b.w2, WithinAbs(a.w2, 1e-14));
    }
  }

  const auto id = two_path_window_counts(kBeta, kOmegaP, 0.0, 0.0, kWin);
  REQUIRE(id.w1 == window_count_normal(kBeta, kWin));
  REQUIRE(id.w2 == 0.0);
}

TEST_CASE("cross intrusion", "[interferometer]") {
  const double i0 = window_count_normal(kBeta, kWin);

  const auto same = window_count_cross_intrusion(0.7, 0.7, kBeta, kWin);
  REQUIRE(same.w1 == i0);
  REQUIRE(same.w2 == 0.0);

  const auto anti = window_count_cross_intrusion(kPi, 0.0, kBeta, kWin);
  REQUIRE(anti.w1 == 0.0);
  REQUIRE(anti.w2 == i0);

  const auto mid = window_count_cross_intrusion(1.0, 0.25, kBeta, kWin);
  REQUIRE_THAT(mid.w1,
               WithinAbs(0.5 * ref_erf(kPi / std::numbers::sqrt2) *
                             (1.0 + std::cos(0.75)),
                         1e-9));

  for (int k = 0; k < 16; ++k) {
    const double phi = 2.0 * kPi * k / 16.0;
    const auto c = window_count_cross_intrusion(phi, 0.3, kBeta, kWin);
    REQUIRE_THAT(c.w1 + c.w2, WithinRel(i0, 1e-14));  // port conservation
    REQUIRE(c.w1 >= 0.0);
    REQUIRE(c.w2 >= 0.0);
  }
}

TEST_CASE("cross-intrusion phase average", "[interferometer]") {
  REQUIRE(cross_intrusion_phase_average() == 0.5);

  // deterministic midpoint rule over the intruder phase
  const double i0 = window_count_normal(kBeta, kWin);
  const int n = 10000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * kPi * (k + 0.5) / n;
    acc += window_count_cross_intrusion(phi, 0.0, kBeta, kWin).w1;
  }
  REQUIRE_THAT(acc / n / i0, WithinAbs(0.5, 1e-3));

  // seeded Monte Carlo lands in the 5-sigma band around 1/2
  std::mt19937_64 gen(2024);
  double mc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * kPi * uniform01(gen);
    mc += window_count_cross_intrusion(phi, 0.0, kBeta, kWin).w1;
  }
  REQUIRE_THAT(mc / n / i0, WithinAbs(0.5, 0.0177));

  // binary restriction averages exactly
  const double w_same = window_count_cross_intrusion(0.0, 0.0, kBeta, kWin).w1;
  const double w_anti = window_count_cross_intrusion(kPi, 0.0, kBeta, kWin).w1;
  REQUIRE((w_same + w_anti) / 2.0 / i0 == 0.5);
}

TEST_CASE("intercept-resend counts", "[interferometer]") {
  REQUIRE(window_count_intercept_resend(1.0).w1 == 0.5);
  REQUIRE(window_count_intercept_resend(1.0).w2 == 0.5);
  REQUIRE(window_count_intercept_resend(0.9983).w1 == 0.49915);
  REQUIRE(window_count_intercept_resend(0.9983).w2 == 0.49915);
  REQUIRE_THROWS_AS(window_count_intercept_resend(1.5), std::invalid_argument);

  // per-herald coin: w1 fraction within 3 sigma of one half
  std::mt19937_64 gen(99);
  const int n = 100000;
  int w1 = 0;
  for (int i = 0; i < n; ++i) w1 += bernoulli(gen, 0.5) ? 1 : 0;
  const double frac = static_cast<double>(w1) / n;
  REQUIRE_THAT(frac, WithinAbs(0.5, 3.0 * std::sqrt(0.25 / n)));
}

TEST_CASE("two simultaneous heralds add their counts", "[interferometer]") {
  const double i0 = window_count_normal(kBeta, kWin);

  const auto full =
      two_photon_window_count(0.0, 0.5, 0.0, kBeta, kOmegaP, DetectorWindow{kInf});
  REQUIRE(full.count_w1 == 2.0);
  REQUIRE_FALSE(full.adversarial_spacing);

  const auto windowed = two_photon_window_count(0.0, 0.5, 0.0, kBeta, kOmegaP, kWin);
  REQUIRE(windowed.count_w1 == 2.0 * i0);

  REQUIRE_THROWS_AS(two_photon_window_count(0.0, 0.05, 0.0, kBeta, kOmegaP, kWin),
                    HeraldsTooClose);
  REQUIRE_NOTHROW(two_photon_window_count(0.0, 0.1, 0.0, kBeta, kOmegaP, kWin));
}

TEST_CASE("shadow-timed herald pairs are called out", "[interferometer]") {
  // separation an exact multiple of the detour
  const auto matched =
      two_photon_window_count(1.0, 1.15, 0.05, kBeta, kOmegaP, kWin);
  REQUIRE(matched.adversarial_spacing);

  const auto unmatched =
      two_photon_window_count(1.0, 1.1735, 0.05, kBeta, kOmegaP, kWin);
  REQUIRE_FALSE(unmatched.adversarial_spacing);
}

TEST_CASE("phase schedules", "[interferometer]") {
  const auto fixed = PhaseSchedule::fixed(0.4, 1.9, 250.0);
  REQUIRE(fixed.mode == PhaseMode::FixedSecret);
  REQUIRE(fixed.broadcast_delay_ns == 250.0);
  REQUIRE(fixed.at(0).phi1 == 0.4);
  REQUIRE(fixed.at(12345).phi2 == 1.9);  // single entry repeats forever

  const auto a = PhaseSchedule::qrng(100, 5);
  const auto b = PhaseSchedule::qrng(100, 5);
  REQUIRE(a.phases.size() == 100);
  for (size_t i = 0; i < 100; ++i) {
    REQUIRE(a.phases[i].phi1 == b.phases[i].phi1);
    REQUIRE(a.phases[i].phi2 == b.phases[i].phi2);
    REQUIRE((a.phases[i].phi1 == 0.0 || a.phases[i].phi1 == kPi));
    REQUIRE((a.phases[i].phi2 == 0.0 || a.phases[i].phi2 == kPi));
  }
  REQUIRE_NOTHROW(validated(a));
  REQUIRE_THROWS_AS(a.at(100), ScheduleExhausted);

  // draws are roughly balanced between 0 and pi
  const auto big = PhaseSchedule::qrng(4000, 11);
  int pis = 0;
  for (const auto& p : big.phases) {
    pis += p.phi1 == kPi ? 1 : 0;
    pis += p.phi2 == kPi ? 1 : 0;
  }
  const double frac = pis / 8000.0;
  REQUIRE(frac > 0.45);
  REQUIRE(frac < 0.55);

  PhaseSchedule bad = a;
  bad.phases[3].phi1 = 0.5;
  REQUIRE_THROWS_AS(validated(bad), NonBinaryPhase);
}

TEST_CASE("scenario dispatcher matches the closed forms", "[interferometer]") {
  const double i0 = window_count_normal(kBeta, kWin);

  // fixed-secret normal is bright at w1 whatever the secret is
  const auto n = scenario_window_counts(Normal{}, kBeta, kOmegaP, kWin, 1.3, 2.1,
                                        PhaseMode::FixedSecret);
  REQUIRE(n.w1 == i0);
  REQUIRE(n.w2 == 0.0);

  // qrng mode: matching binary phases stay bright, differing ones go dark
  const auto q00 = scenario_window_counts(Normal{}, kBeta, kOmegaP, kWin, 0.0,
                                          0.0, PhaseMode::QrngBinary);
  REQUIRE(q00.w1 == i0);
  const auto qpp = scenario_window_counts(Normal{}, kBeta, kOmegaP, kWin, kPi,
                                          kPi, PhaseMode::QrngBinary);
  REQUIRE_THAT(qpp.w1, WithinRel(i0, 1e-15));
  const auto q0p = scenario_window_counts(Normal{}, kBeta, kOmegaP, kWin, 0.0,
                                          kPi, PhaseMode::QrngBinary);
  REQUIRE(q0p.w1 == 0.0);
  REQUIRE(q0p.w2 == i0);

  // qrng normal follows cos^2 of the half phase sum
  const auto qg = scenario_window_counts(Normal{}, kBeta, kOmegaP, kWin, kPi / 3.0,
                                         kPi / 4.0, PhaseMode::QrngBinary);
  const double half = (kPi / 3.0 + kPi / 4.0) / 2.0;
  REQUIRE_THAT(qg.w1, WithinRel(i0 * std::cos(half) * std::cos(half), 1e-13));

  // side intrusion with the compensated secret equals the canonical form
  SideIntrusion si;
  si.delta_ns = 0.12;
  si.xi_wavelength_nm = 400.0;
  const double xi = resolve_xi(si, kOmegaP);
  const auto s = scenario_window_counts(si, kBeta, kOmegaP, kWin, 0.9, 1.7,
                                        PhaseMode::FixedSecret);
  const auto s_ref = window_count_side_intrusion(0.12, xi, kBeta, kOmegaP, kWin);
  REQUIRE_THAT(s.w1, WithinAbs(s_ref.w1, 1e-13));
  REQUIRE_THAT(s.w2, WithinAbs(s_ref.w2, 1e-13));

  // cross intrusion against either corner
  CrossIntrusion ci;
  ci.phi_int_rad = 1.0;
  ci.corner = Corner::First;
  const auto c1 = scenario_window_counts(ci, kBeta, kOmegaP, kWin, 0.25, 0.6,
                                         PhaseMode::FixedSecret);
  const auto c1_ref = window_count_cross_intrusion(1.0, 0.25, kBeta, kWin);
  REQUIRE_THAT(c1.w1, WithinRel(c1_ref.w1, 1e-12));
  REQUIRE_THAT(c1.w2, WithinRel(c1_ref.w2, 1e-12));

  ci.corner = Corner::Second;
  const auto c2 = scenario_window_counts(ci, kBeta, kOmegaP, kWin, 0.25, 0.6,
                                         PhaseMode::FixedSecret);
  const auto c2_ref = window_count_cross_intrusion(1.0, 0.6, kBeta, kWin);
  REQUIRE_THAT(c2.w1, WithinRel(c2_ref.w1, 1e-12));

  // block and intercept-resend ignore the phases entirely
  const auto bl = scenario_window_counts(Block{}, kBeta, kOmegaP, kWin, 0.9, 1.7,
                                         PhaseMode::FixedSecret);
  REQUIRE(bl.w1 == i0 / 4.0);
  REQUIRE(bl.w2 == i0 / 4.0);
  const auto ir = scenario_window_counts(InterceptResend{}, kBeta, kOmegaP, kWin,
                                         0.9, 1.7, PhaseMode::QrngBinary);
  REQUIRE(ir.w1 == i0 / 2.0);
  REQUIRE(ir.w2 == i0 / 2.0);
}

TEST_CASE("envelope offset shifts both routes together", "[interferometer]") {
  const auto off = scenario_window_counts(Normal{}, kBeta, kOmegaP, kWin, 0.0,
                                          0.0, PhaseMode::FixedSecret, 0.04);
  REQUIRE(off.w1 == windowed_fraction(kBeta, kWin, 0.04));
  REQUIRE(off.w1 < window_count_normal(kBeta, kWin));
  REQUIRE(off.w2 == 0.0);

  // symmetric in the sign of the miscentering
  const auto neg = scenario_window_counts(Normal{}, kBeta, kOmegaP, kWin, 0.0,
                                          0.0, PhaseMode::FixedSecret, -0.04);
  REQUIRE(neg.w1 == off.w1);
}
