#include <doctest.h>

#include <cmath>

#include "phonon_herald/analytic.hpp"
#include "phonon_herald/correlations.hpp"
#include "phonon_herald/covariance.hpp"
#include "phonon_herald/errors.hpp"
#include "phonon_herald/experiments.hpp"
#include "phonon_herald/fock_oracle.hpp"

using namespace herald;
using namespace herald::fock;
using model::PulseSegment;
using model::SegmentKind;
using cov::cplx;

namespace {

void check_valid(const TruncatedState& s) {
  const StateDiagnostics d = diagnose(s);
  CHECK(d.trace_error < 1e-10);
  CHECK(d.hermiticity_error < 1e-12);
  CHECK(d.min_eigenvalue > -1e-10);
}

double click_g2(double n_0, double gain, Detector det, int na, int nb) {
  auto st = ideal_write(product_thermal(na, nb, 0.0, n_0), gain);
  auto click = condition_on_click(st, det);
  return optical_g2(ideal_swap(click.state));
}

}  // namespace

TEST_CASE("thermal product state") {
  const TruncatedState s = product_thermal(4, 20, 0.0, 0.3);
  check_valid(s);
  CHECK(expectation(s, {Ladder::Bd, Ladder::B}).real() == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(std::abs(expectation(s, {Ladder::Ad, Ladder::A})) == 0.0);
  CHECK(s.leakage < 1e-10);
}

TEST_CASE("relaxation to the bath") {
  OracleRates k;
  k.kappa = 1.0;
  k.gamma = 0.5;
  k.n_th = 0.2;
  TruncatedState s = product_thermal(3, 12, 0.01, 0.01);
  s = lindblad_evolve(s, k, 80.0);
  check_valid(s);
  CHECK(expectation(s, {Ladder::Bd, Ladder::B}).real() == doctest::Approx(0.2).epsilon(1e-7));
  CHECK(std::abs(expectation(s, {Ladder::Ad, Ladder::A})) < 1e-12);
  const auto diag = mechanical_diagonal(s);
  for (int n = 0; n < 6; ++n) CHECK(diag[n] == doctest::Approx(std::pow(0.2 / 1.2, n) / 1.2).epsilon(1e-6));
}

TEST_CASE("lossless write matches the squeezed-state amplitudes") {
  const double gain = 0.05;
  const TruncatedState s = ideal_write(product_thermal(8, 8, 0.0, 0.0), gain);
  check_valid(s);
  const auto amp = analytic::write_state_amplitudes(gain, 8);
  const auto joint = joint_number_distribution(s);
  for (int na = 0; na <= 8; ++na)
    for (int nb = 0; nb <= 8; ++nb) {
      const double expect = na == nb ? std::norm(amp[na]) : 0.0;
      CHECK(std::abs(joint[s.index(na, nb)] - expect) < 1e-4);
    }
}

TEST_CASE("single-photon herald reproduces the conditional phonon weights") {
  for (double n0 : {0.01, 0.1, 0.3})
    for (double gain : {0.001, 0.01, 0.05}) {
      const TruncatedState st = ideal_write(product_thermal(9, 22, 0.0, n0), gain);
      const ClickResult c = condition_on_click(st, Detector::Projector1);
      const auto diag = mechanical_diagonal(c.state);
      const auto cs = analytic::conditional_state(n0, gain);
      double worst = 0.0;
      for (std::size_t n = 0; n < diag.size(); ++n) worst = std::max(worst, std::abs(diag[n] - cs.weight(n)));
      CHECK(worst < 1e-6);

      // Optical marginal of the squeezed thermal state is thermal with mean
      // equal to the herald rate.
      const double n_a = analytic::herald_rate(n0, gain);
      CHECK(c.click_probability == doctest::Approx(n_a / ((1.0 + n_a) * (1.0 + n_a))).epsilon(1e-6));
    }

  // The p e^{-gain} variant of the weights is measurably off.
  const TruncatedState st = ideal_write(product_thermal(6, 22, 0.0, 0.1), 0.01);
  const auto diag = mechanical_diagonal(condition_on_click(st, Detector::Projector1).state);
  analytic::ConditionalPhononState wrong;
  wrong.pbar = 0.1 / 1.1 * std::exp(-0.01);
  CHECK(std::abs(diag[2] - wrong.weight(2)) > 1e-5);
}

TEST_CASE("click on optical vacuum") {
  CHECK_THROWS_AS(condition_on_click(product_thermal(3, 5, 0.0, 0.2), Detector::Projector1), ConditioningError);
  CHECK_THROWS_AS(herald_annihilation(product_thermal(3, 5, 0.0, 0.2)), ConditioningError);
}

TEST_CASE("heralded g2 after an ideal swap") {
  CHECK(click_g2(0.0, 1e-6, Detector::Projector1, 10, 10) < 1e-4);
  CHECK(click_g2(0.1, 1e-6, Detector::Projector1, 10, 18) == doctest::Approx(0.3195).epsilon(2e-4));
  CHECK(click_g2(0.1, 1e-6, Detector::Projector1, 10, 18) ==
        doctest::Approx(analytic::g2_conditional_zero(0.1, 1e-6)).epsilon(1e-6));

  const double th = click_g2(1e-4, 0.05, Detector::Threshold, 14, 14);
  CHECK(std::abs(th - analytic::g2_conditional_zero_threshold_detector(1e-4, 0.05)) < 1e-4);
  CHECK(th > click_g2(1e-4, 0.05, Detector::Projector1, 14, 14));
}

TEST_CASE("truncation is detected") {
  CHECK_THROWS_AS(ideal_write(product_thermal(2, 2, 0.0, 0.0), 1.0), TruncationError);
}

TEST_CASE("oracle against the covariance engine") {
  model::SystemParams p = model::SystemParams::defaults();
  p.n_th = 0.1;
  p.n_0 = 0.1;
  const auto sched = model::heralding_schedule(50e-9, 0.1, 5e-9, 1e-9, 100.0);
  const std::vector<double> times = {10e-9, 30e-9, 50e-9, 52e-9, 55e-9, 56e-9};
  const cov::BlockSet bs = cov::evolve_schedule(p, sched, cov::thermal_block(p.n_0), times);

  TruncatedState st = product_thermal(6, 12, 0.0, p.n_0);
  double t = 0.0;
  for (double target : times) {
    while (t < target) {
      const std::size_t seg = sched.segment_at(t);
      const double step = std::min(target, sched.end(seg)) - t;
      st = lindblad_evolve(st, p, sched[seg], step);
      t += step;
    }
    check_valid(st);
    const auto& g = bs.equal_time(bs.index_of(target));
    const double na = expectation(st, {Ladder::Ad, Ladder::A}).real();
    const double nb = expectation(st, {Ladder::Bd, Ladder::B}).real();
    CHECK(std::abs(na - g(cov::Ad, cov::A).real()) < 1e-3 * g(cov::Ad, cov::A).real());
    CHECK(std::abs(nb - g(cov::Bd, cov::B).real()) < 1e-3 * g(cov::Bd, cov::B).real());
    const cplx ab = expectation(st, {Ladder::A, Ladder::B});
    CHECK(std::abs(ab - g(cov::A, cov::B)) < 1e-3 * std::abs(g(cov::A, cov::B)) + 1e-12);
  }

  // Six-operator moment at the herald time.
  const double tw = 50e-9;
  TruncatedState sw = product_thermal(6, 12, 0.0, p.n_0);
  sw = lindblad_evolve(sw, p, sched[0], tw);
  const std::vector<Ladder> ops = {Ladder::Ad, Ladder::Bd, Ladder::Bd, Ladder::B, Ladder::B, Ladder::A};
  const cplx oracle = expectation(sw, ops);
  const cplx engine = corr::gaussian_moment(
      bs, {{tw, cov::Ad}, {tw, cov::Bd}, {tw, cov::Bd}, {tw, cov::B}, {tw, cov::B}, {tw, cov::A}});
  CHECK(std::abs(oracle - engine) < 1e-6 * std::abs(engine));
}

TEST_CASE("point-detection herald matches the engine's conditional g2") {
  model::SystemParams p = model::SystemParams::defaults();
  p.n_th = 0.1;
  p.n_0 = 0.1;
  const auto sched = model::heralding_schedule(50e-9, 0.1, 5e-9, 1e-9, 100.0);
  const double g_engine = exp::conditional_g2_zero(p, sched, 50e-9, 1e-9);

  auto run = [&](int na, int nb) {
    TruncatedState st = lindblad_evolve(product_thermal(na, nb, 0.0, p.n_0), p, sched[0], 50e-9);
    st = herald_annihilation(st).state;
    st = lindblad_evolve(st, p, sched[1], 5e-9);
    return oracle_g2(st, p, sched[2]);
  };
  const double g_small = run(5, 14);
  CHECK(std::abs(g_small - g_engine) < 1e-3 * g_engine);
  CHECK(std::abs(run(10, 28) - g_small) < 1e-4);
}
