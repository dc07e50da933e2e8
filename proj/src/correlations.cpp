#include "phonon_herald/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "phonon_herald/errors.hpp"

namespace herald::corr {

using cplx = std::complex<double>;
using model::SegmentKind;

std::vector<Pairing> perfect_matchings(int n) {
  if (n < 0 || n % 2 != 0) throw UsageError("perfect matchings need an even count");
  std::vector<Pairing> out;
  Pairing cur;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::function<void()> rec = [&]() {
    int first = -1;
    for (int i = 0; i < n; ++i)
      if (!used[i]) {
        first = i;
        break;
      }
    if (first < 0) {
      out.push_back(cur);
      return;
    }
    used[first] = true;
    for (int j = first + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      cur.emplace_back(first, j);
      rec();
      cur.pop_back();
      used[j] = false;
    }
    used[first] = false;
  };
  rec();
  return out;
}

cplx gaussian_moment(const cov::BlockSet& blocks, const MomentRequest& req) {
  const int n = static_cast<int>(req.size());
  if (n != 2 && n != 4 && n != 6) throw UsageError("moment requests have 2, 4 or 6 operators");
  std::vector<std::size_t> idx(req.size());
  for (std::size_t k = 0; k < req.size(); ++k) idx[k] = blocks.index_of(req[k].time);

  // Pair table <O_k O_l> for k < l.
  std::array<std::array<cplx, 6>, 6> pair{};
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      pair[k][l] = blocks.block(idx[k], idx[l]).g(req[k].op, req[l].op);

  cplx total = 0.0;
  for (const auto& m : perfect_matchings(n)) {
    cplx term = 1.0;
    for (const auto& [k, l] : m) term *= pair[k][l];
    total += term;
  }
  return total;
}

namespace {

using cov::A;
using cov::Ad;

void check_floor(double v, const char* what) {
  if (!(std::abs(v) >= kDenominatorFloor))
    throw ConditioningError(std::string("degenerate conditioning: ") + what + " below floor");
}

bool in_kind(const model::DriveSchedule& s, double t, SegmentKind kind) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].kind == kind && s.within(i, t)) return true;
  return false;
}

void check_times(const cov::BlockSet& blocks, double t_w, double t_r, double tau) {
  const auto& s = blocks.schedule();
  if (s.size() == 0) return;
  if (!in_kind(s, t_w, SegmentKind::Write)) throw UsageError("herald time must lie in a write segment");
  if (!in_kind(s, t_r, SegmentKind::Readout) || !in_kind(s, t_r + tau, SegmentKind::Readout))
    throw UsageError("readout times must lie in a readout segment");
}

double g1_at(const cov::BlockSet& b, double t) {
  return gaussian_moment(b, {{t, Ad}, {t, A}}).real();
}

double g2_at(const cov::BlockSet& b, double t, double tp) {
  return gaussian_moment(b, {{tp, Ad}, {t, Ad}, {t, A}, {tp, A}}).real();
}

double g3_at(const cov::BlockSet& b, double t, double tp, double tpp) {
  return gaussian_moment(b, {{tpp, Ad}, {tp, Ad}, {t, Ad}, {t, A}, {tp, A}, {tpp, A}}).real();
}

}  // namespace

CorrelationRecord intensity_G1(const cov::BlockSet& blocks, double t) {
  return {CorrelationKind::G1, {t}, g1_at(blocks, t), std::nullopt};
}

CorrelationRecord intensity_G2(const cov::BlockSet& blocks, double t, double tp) {
  return {CorrelationKind::G2, {t, tp}, g2_at(blocks, t, tp), std::nullopt};
}

CorrelationRecord intensity_G3(const cov::BlockSet& blocks, double t, double tp, double tpp) {
  return {CorrelationKind::G3, {t, tp, tpp}, g3_at(blocks, t, tp, tpp), std::nullopt};
}

CorrelationRecord conditional_g2(const cov::BlockSet& blocks, double t_w, double t_r, double tau) {
  check_times(blocks, t_w, t_r, tau);
  const double s = t_r + tau;
  const double g1w = g1_at(blocks, t_w);
  check_floor(g1w, "G1(t_w, t_w)");
  const double g2r = g2_at(blocks, t_r, t_w);
  const double g2s = g2_at(blocks, s, t_w);
  check_floor(g2r, "G2(t_r, t_w)");
  check_floor(g2s, "G2(t_r + tau, t_w)");
  const double g3 = g3_at(blocks, t_r, s, t_w);
  // (G3/G1w) / ((G2r/G1w)(G2s/G1w))
  const double value = (g3 / g2r) * (g1w / g2s);
  return {CorrelationKind::g2_cond, {t_r, s}, value, t_w};
}

cplx conditional_field(const cov::BlockSet& blocks, double t_w, double t_r, double tau) {
  check_times(blocks, t_w, t_r, tau);
  const double g1w = g1_at(blocks, t_w);
  check_floor(g1w, "G1(t_w, t_w)");
  const double s = t_r + tau;
  return gaussian_moment(blocks, {{t_w, Ad}, {t_r, Ad}, {s, A}, {t_w, A}}) / g1w;
}

CorrelationRecord conditional_g1(const cov::BlockSet& blocks, double t_w, double t_r, double tau) {
  const cplx field = conditional_field(blocks, t_w, t_r, tau);
  const double s = t_r + tau;
  const double g1w = g1_at(blocks, t_w);
  const double nr = g2_at(blocks, t_r, t_w) / g1w;
  const double ns = g2_at(blocks, s, t_w) / g1w;
  check_floor(nr * ns, "conditional intensity product");
  return {CorrelationKind::g1_norm, {t_r, s}, std::abs(field) / std::sqrt(nr * ns), t_w};
}

CorrelationRecord conditional_g1_zero_delay(const cov::BlockSet& blocks, double t_w, double t_r,
                                            double tau) {
  const cplx field = conditional_field(blocks, t_w, t_r, tau);
  const double g1w = g1_at(blocks, t_w);
  const double nr = g2_at(blocks, t_r, t_w) / g1w;
  check_floor(nr, "conditional intensity at t_r");
  return {CorrelationKind::g1_norm, {t_r, t_r + tau}, std::abs(field) / nr, t_w};
}

double coherence_time(const std::vector<double>& taus, const std::vector<double>& values) {
  if (taus.size() != values.size() || taus.empty())
    throw UsageError("coherence_time: mismatched or empty samples");
  const double level = std::exp(-1.0);
  std::vector<double> env(values.size());
  double run = 0.0;
  for (std::size_t k = values.size(); k-- > 0;) {
    run = std::max(run, std::abs(values[k]));
    env[k] = run;
  }
  if (env[0] < level) return taus[0];
  for (std::size_t k = 1; k < env.size(); ++k) {
    if (env[k] < level) {
      const double f = (env[k - 1] - level) / (env[k - 1] - env[k]);
      return taus[k - 1] + f * (taus[k] - taus[k - 1]);
    }
  }
  throw NotConvergedError("no 1/e crossing within the delay sweep");
}

std::vector<std::size_t> local_maxima(const std::vector<double>& v, double min_prominence) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (v[k] > v[k - 1] && v[k] >= v[k + 1]) {
      const double drop = v[k] - std::min(v[k - 1], v[k + 1]);
      if (drop >= min_prominence) out.push_back(k);
    }
  }
  return out;
}

}  // namespace herald::corr
