#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "phonon_herald/correlations.hpp"
#include "phonon_herald/errors.hpp"
#include "phonon_herald/experiments.hpp"

using namespace herald;
using namespace herald::corr;
using cov::A;
using cov::Ad;
using cov::B;
using cov::Bd;
using model::PulseSegment;
using model::SegmentKind;

namespace {

// Brute-force matchings: canonical forms of all permutations.
std::set<Pairing> brute_matchings(int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::set<Pairing> out;
  do {
    Pairing p;
    for (int k = 0; k < n; k += 2) p.emplace_back(std::min(perm[k], perm[k + 1]), std::max(perm[k], perm[k + 1]));
    std::sort(p.begin(), p.end());
    out.insert(p);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

cov::BlockSet heralded_blocks(const model::SystemParams& p, const model::DriveSchedule& s, double t_w,
                              const std::vector<double>& readout) {
  std::vector<double> marked{t_w};
  marked.insert(marked.end(), readout.begin(), readout.end());
  std::sort(marked.begin(), marked.end());
  return cov::evolve_schedule(p, s, cov::thermal_block(p.n_0), marked);
}

}  // namespace

TEST_CASE("perfect matchings") {
  for (int n : {2, 4, 6}) {
    auto got = perfect_matchings(n);
    for (auto& m : got) std::sort(m.begin(), m.end());
    const std::set<Pairing> uniq(got.begin(), got.end());
    CHECK(uniq.size() == got.size());
    CHECK(uniq == brute_matchings(n));
  }
  CHECK(perfect_matchings(4).size() == 3);
  CHECK(perfect_matchings(6).size() == 15);
}

TEST_CASE("gaussian moments on simple states") {
  const auto p = model::SystemParams::defaults();
  const model::DriveSchedule off({PulseSegment{SegmentKind::Off, 1e-3, 0.0}});
  const cov::BlockSet vac = cov::evolve_schedule(p, off, cov::thermal_block(0.0), {0.0});
  CHECK(std::abs(gaussian_moment(vac, {{0.0, Ad}, {0.0, A}})) == 0.0);
  CHECK(gaussian_moment(vac, {{0.0, A}, {0.0, Ad}}).real() == 1.0);

  const double n = 0.37;
  const cov::BlockSet th = cov::evolve_schedule(p, off, cov::thermal_block(n), {0.0});
  CHECK(gaussian_moment(th, {{0.0, Bd}, {0.0, Bd}, {0.0, B}, {0.0, B}}).real() == doctest::Approx(2.0 * n * n));
  CHECK(gaussian_moment(th, {{0.0, B}, {0.0, Bd}, {0.0, Bd}, {0.0, B}}).real() ==
        doctest::Approx(2.0 * n * (n + 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_moment(th, {{1.0, B}, {0.0, Bd}}), UsageError);
}

TEST_CASE("relaxed thermal state has g2 = 2") {
  const auto p = model::SystemParams::defaults();
  const model::DriveSchedule s({PulseSegment{SegmentKind::Write, 50e-9, 0.1}, PulseSegment{SegmentKind::Off, 2e-3, 0.0}});
  const double t = s.total_duration();
  const cov::BlockSet bs = cov::evolve_schedule(p, s, cov::thermal_block(p.n_0), {t});
  const double nb = gaussian_moment(bs, {{t, Bd}, {t, B}}).real();
  const double g2 = gaussian_moment(bs, {{t, Bd}, {t, Bd}, {t, B}, {t, B}}).real() / (nb * nb);
  CHECK(std::abs(g2 - 2.0) < 1e-6);
  CHECK(nb == doctest::Approx(p.n_th).epsilon(1e-6));
}

TEST_CASE("heralded g2 limits") {
  auto p = model::SystemParams::defaults();
  const double t_r = 1e-9;

  SUBCASE("vacuum seed gives antibunching near zero") {
    model::SystemParams q = p;
    q.n_0 = 0.0;
    q.n_th = 0.0;
    q.gamma = 1e-6;
    const auto s = model::heralding_schedule(2e-9, 0.1, 30e-9, 5e-9, 100.0);
    const double g2 = exp::conditional_g2_zero(q, s, exp::default_herald_time(s), t_r);
    CHECK(g2 >= 0.0);
    CHECK(g2 < 5e-3);
  }
  SUBCASE("short delay antibunches") {
    const auto s = model::heralding_schedule(50e-9, 0.1, 5e-9, 1e-6, 100.0);
    CHECK(exp::conditional_g2_zero(p, s, 50e-9, t_r) < 0.1);
  }
  SUBCASE("long delay relaxes to thermal bunching") {
    const double t_off = 20.0 / (p.gamma * p.n_th);
    const auto s = model::heralding_schedule(50e-9, 0.1, t_off, 1e-6, 100.0);
    CHECK(exp::conditional_g2_zero(p, s, 50e-9, t_r) == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("heralded quantities: symmetry, reality, normalization") {
  const auto p = model::SystemParams::defaults();
  const auto s = model::heralding_schedule(50e-9, 0.1, 5e-9, 200e-9, 100.0);
  const double t_w = 50e-9, r0 = 56e-9, r1 = 71e-9;
  const cov::BlockSet bs = heralded_blocks(p, s, t_w, {r0, r1});

  const double fwd = conditional_g2(bs, t_w, r0, r1 - r0).value;
  const double bwd = conditional_g2(bs, t_w, r1, r0 - r1).value;
  CHECK(fwd == doctest::Approx(bwd).epsilon(1e-12));

  for (double t : {t_w, r0, r1}) {
    const auto g1 = gaussian_moment(bs, {{t, Ad}, {t, A}});
    CHECK(std::abs(g1.imag()) < 1e-9 * std::abs(g1));
  }
  const auto g2 = gaussian_moment(bs, {{t_w, Ad}, {r0, Ad}, {r0, A}, {t_w, A}});
  CHECK(std::abs(g2.imag()) < 1e-9 * std::abs(g2));
  const auto g3 = gaussian_moment(bs, {{t_w, Ad}, {r1, Ad}, {r0, Ad}, {r0, A}, {r1, A}, {t_w, A}});
  CHECK(std::abs(g3.imag()) < 1e-9 * std::abs(g3));
  CHECK(intensity_G3(bs, r0, r1, t_w).value == doctest::Approx(g3.real()));

  CHECK(conditional_g1(bs, t_w, r0, 0.0).value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(conditional_g1_zero_delay(bs, t_w, r0, 0.0).value == doctest::Approx(1.0).epsilon(1e-14));
  const double g1n = conditional_g1(bs, t_w, r0, r1 - r0).value;
  CHECK(g1n > 0.0);
  CHECK(g1n <= 1.0 + 1e-12);

  CHECK_THROWS_AS(conditional_g2(bs, r0, r0, 0.0), UsageError);    // herald outside the write
  CHECK_THROWS_AS(conditional_g2(bs, t_w, t_w, 0.0), UsageError);  // readout time outside the readout
}

TEST_CASE("degenerate conditioning fails loudly") {
  auto p = model::SystemParams::defaults();
  p.n_0 = 0.0;
  const model::DriveSchedule s({PulseSegment{SegmentKind::Write, 10e-9, 0.0}, PulseSegment{SegmentKind::Readout, 10e-9, 10.0}});
  const cov::BlockSet bs = heralded_blocks(p, s, 10e-9, {15e-9});
  CHECK_THROWS_AS(conditional_g2(bs, 10e-9, 15e-9, 0.0), ConditioningError);
}

TEST_CASE("coherence time extraction") {
  const double T = 3.7e-6;
  std::vector<double> taus, vals;
  for (int k = 0; k <= 400; ++k) {
    taus.push_back(k * 5e-8);
    vals.push_back(std::exp(-taus.back() / T));
  }
  CHECK(coherence_time(taus, vals) == doctest::Approx(T).epsilon(5e-8 / T));
  CHECK(linewidth_from_coherence_time(1e-6) == doctest::Approx(1.0 / (M_PI * 1e-6)));

  // Oscillating record: envelope through the maxima.
  std::vector<double> osc;
  for (double t : taus) osc.push_back(std::exp(-t / T) * std::abs(std::cos(2.0 * M_PI * t / 1e-6)));
  CHECK(coherence_time(taus, osc) == doctest::Approx(T).epsilon(0.15));

  std::vector<double> flat(taus.size(), 0.9);
  CHECK_THROWS_AS(coherence_time(taus, flat), NotConvergedError);
}

TEST_CASE("local maxima") {
  const std::vector<double> v = {0.0, 1.0, 0.0, 0.5, 0.5, 0.2, 2.0, 1.9};
  const auto idx = local_maxima(v);
  // A plateau counts once, at its left edge.
  REQUIRE(idx.size() == 3);
  CHECK(idx[0] == 1);
  CHECK(idx[1] == 3);
  CHECK(idx[2] == 6);
  CHECK(local_maxima({1.0, 1.0 + 1e-12, 1.0}, 1e-9).empty());
}
