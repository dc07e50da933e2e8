#include <doctest.h>

#include <cmath>

#include "phonon_herald/core_model.hpp"
#include "phonon_herald/errors.hpp"

using namespace herald;
using namespace herald::model;

namespace {

SystemParams spec_params() {
  // kappa/2pi = 0.5 GHz, gamma/2pi = 7.5 kHz.
  SystemParams p = SystemParams::defaults();
  p.kappa = hz_to_angular(0.5e9);
  p.gamma = hz_to_angular(7.5e3);
  return p;
}

}  // namespace

TEST_CASE("effective coupling") {
  const SystemParams p = SystemParams::defaults();
  CHECK(effective_coupling(p, {SegmentKind::Off, 1e-9, 0.0}) == 0.0);
  CHECK(effective_coupling(p, {SegmentKind::Write, 1e-9, 0.0}) == 0.0);
  CHECK(effective_coupling(p, {SegmentKind::Write, 1e-9, 0.1}) ==
        doctest::Approx(hz_to_angular(0.316227766e6)).epsilon(1e-9));
  CHECK(effective_coupling(p, {SegmentKind::Readout, 1e-9, 1e4}) ==
        doctest::Approx(hz_to_angular(100e6)).epsilon(1e-12));

  double last = -1.0;
  for (double n : {0.0, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e5}) {
    const double g = effective_coupling(p, {SegmentKind::Cool, 1e-9, n});
    CHECK(g > last);
    last = g;
  }
}

TEST_CASE("tilde gain") {
  const SystemParams p = spec_params();
  CHECK(tilde_gain(p, {SegmentKind::Off, 1e-9, 0.0}) == 0.0);
  CHECK(tilde_gain(p, {SegmentKind::Write, 1e-9, 0.1}) == doctest::Approx(hz_to_angular(400.0)).epsilon(1e-12));
  // Quadratic in the coupling: n -> c^2 n scales g by c.
  for (double c : {0.5, 2.0, 7.0}) {
    const double g1 = tilde_gain(p, {SegmentKind::Write, 1e-9, 0.03});
    const double g2 = tilde_gain(p, {SegmentKind::Write, 1e-9, 0.03 * c * c});
    CHECK(g2 == doctest::Approx(c * c * g1).epsilon(1e-12));
  }
}

TEST_CASE("pair probability per pulse at the defaults") {
  const SystemParams p = SystemParams::defaults();
  const double gt = tilde_gain(p, {SegmentKind::Write, 50e-9, 0.1}) * 50e-9;
  const double per_pulse = 2.0 * gt * (1.0 + p.n_0);
  CHECK(per_pulse == doctest::Approx(9.0657e-4).epsilon(1e-4));
}

TEST_CASE("power and photon number") {
  const SystemParams p = SystemParams::defaults();
  CHECK(power_to_photon_number(p, 0.0, Sideband::Lower) == 0.0);
  const double n = power_to_photon_number(p, 150e-6, Sideband::Lower);
  CHECK(n == doctest::Approx(1002.47).epsilon(1e-4));
  CHECK(std::abs(n - 1e3) / 1e3 < 0.25);
  for (double power : {1e-9, 1e-6, 3.3e-4, 2e-2})
    for (Sideband s : {Sideband::Lower, Sideband::Upper}) {
      const double back = photon_number_to_power(p, power_to_photon_number(p, power, s), s);
      CHECK(std::abs(back - power) / power < 1e-12);
    }
}

TEST_CASE("schedule lookup") {
  const DriveSchedule s = heralding_schedule(50e-9, 0.1, 5e-9, 1e-6, 100.0);
  REQUIRE(s.size() == 3);
  CHECK(s.total_duration() == doctest::Approx(1.055e-6));
  CHECK(s.segment_at(0.0) == 0);
  CHECK(s.segment_at(49.9e-9) == 0);
  CHECK(s.segment_at(s.end(0)) == 1);  // boundary belongs to the later segment
  CHECK(s.segment_at(s.end(1)) == 2);
  CHECK(s.segment_at(1.0e-6) == 2);
  CHECK(s.segment_at(s.total_duration()) == 2);
  CHECK_THROWS_AS(s.segment_at(s.total_duration() * (1.0 + 1e-9)), UsageError);
  CHECK_THROWS_AS(s.segment_at(-1e-12), UsageError);
  CHECK(s.within(0, s.end(0)));
  CHECK(s.find_first(SegmentKind::Readout) == 2);
  CHECK(s.find_first(SegmentKind::Cool) == s.size());

  CHECK(heralding_schedule(50e-9, 0.1, 0.0, 1e-6, 100.0).size() == 2);
}

TEST_CASE("malformed schedules") {
  CHECK_THROWS_AS(DriveSchedule(std::vector<PulseSegment>{}), ScheduleError);
  CHECK_THROWS_AS(DriveSchedule({{SegmentKind::Write, 0.0, 0.1}}), ScheduleError);
  CHECK_THROWS_AS(DriveSchedule({{SegmentKind::Write, 1e-9, -0.1}}), ScheduleError);
  CHECK_THROWS_AS(DriveSchedule({{SegmentKind::Off, 1e-9, 1.0}}), ScheduleError);
  CHECK_THROWS_AS(segment_kind_from_string("pump"), ScheduleError);
  CHECK(segment_kind_from_string("readout") == SegmentKind::Readout);
}

TEST_CASE("parameter validation") {
  SystemParams p = SystemParams::defaults();
  CHECK_NOTHROW(p.validate());
  p.kappa = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SystemParams::defaults();
  p.n_0 = 7.0;  // above n_th
  CHECK_THROWS_AS(p.validate(), ConfigError);
  const SystemParams q = SystemParams::from_hz(1e6, 0.14e9, 1.0, 5.1e9, 1.9e14, 6.4, 0.01);
  CHECK(q.kappa == doctest::Approx(SystemParams::defaults().kappa));
  CHECK(q.gamma == doctest::Approx(kTwoPi));
}

TEST_CASE("regime report") {
  const SystemParams p = SystemParams::defaults();
  const DriveSchedule s = heralding_schedule(50e-9, 0.1, 5e-9, 1e-6, 100.0);
  const RegimeReport r = validate_regime(p, s);
  CHECK(r.all_ok());
  CHECK(r.g0_over_kappa == doctest::Approx(1.0 / 140.0));
  CHECK(r.decoherence_margin == doctest::Approx(55e-9 * p.gamma * p.n_th));
  CHECK(r.thermal_time == doctest::Approx(1.0 / (p.gamma * p.n_th)));
  CHECK(r.thermal_time_cycles == doctest::Approx(kTwoPi / (p.gamma * p.n_th)));

  SystemParams q = p;
  q.kappa = q.omega_m;
  CHECK_FALSE(validate_regime(q, s).sideband_resolved_ok);

  const SystemParams w = spec_params();
  const RegimeReport long_off = validate_regime(w, heralding_schedule(50e-9, 0.1, 100e-6, 1e-6, 100.0));
  CHECK_FALSE(long_off.decoherence_budget_ok);
  CHECK(long_off.thermal_time == doctest::Approx(3.3e-6).epsilon(0.01));

  CHECK_THROWS_AS(validate_regime(p, DriveSchedule({{SegmentKind::Cool, 1e-9, 1.0}})), ScheduleError);
}
