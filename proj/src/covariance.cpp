#include "phonon_herald/covariance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "phonon_herald/errors.hpp"
#include "phonon_herald/quadrature.hpp"

namespace herald::cov {

namespace {

constexpr cplx I{0.0, 1.0};

// Pairs of basis indices that M couples; M is block diagonal on them when at
// most one sideband is driven.
struct BlockPairs {
  int p[2][2];
};

BlockPairs pairs_for(const DriftMatrix& d) {
  if (d.g_plus != 0.0) return {{{A, Bd}, {Ad, B}}};
  return {{{A, B}, {Ad, Bd}}};
}

double condition_number(const Mat4& x) {
  Eigen::JacobiSVD<Mat4> svd(x);
  const auto& s = svd.singularValues();
  if (s(3) == 0.0) return INFINITY;
  return s(0) / s(3);
}

EigenSystem diagonalize_blocks(const DriftMatrix& d) {
  EigenSystem e;
  e.m = d.m;
  e.x = Mat4::Zero();
  const BlockPairs bp = pairs_for(d);
  for (int blk = 0; blk < 2; ++blk) {
    const int i = bp.p[blk][0], j = bp.p[blk][1];
    const cplx d1 = d.m(i, i), d2 = d.m(j, j), c = d.m(i, j), dd = d.m(j, i);
    const cplx half_tr = 0.5 * (d1 + d2);
    const cplx root = std::sqrt(0.25 * (d1 - d2) * (d1 - d2) + c * dd);
    const cplx lam[2] = {half_tr - root, half_tr + root};
    for (int k = 0; k < 2; ++k) {
      // Two candidate eigenvectors of the 2x2 block; keep the larger one.
      cplx v1[2] = {c, lam[k] - d1};
      cplx v2[2] = {lam[k] - d2, dd};
      const double n1 = std::hypot(std::abs(v1[0]), std::abs(v1[1]));
      const double n2 = std::hypot(std::abs(v2[0]), std::abs(v2[1]));
      const cplx* v = n1 >= n2 ? v1 : v2;
      const double nrm = std::max(n1, n2);
      const int col = 2 * k + blk;  // lambdas 0,1 lower branch; 2,3 upper branch
      e.lambdas(col) = lam[k];
      if (nrm == 0.0) {
        e.x(k == 0 ? i : j, col) = 1.0;
      } else {
        e.x(i, col) = v[0] / nrm;
        e.x(j, col) = v[1] / nrm;
      }
    }
  }
  return e;
}

EigenSystem diagonalize_general(const DriftMatrix& d) {
  Eigen::ComplexEigenSolver<Mat4> solver(d.m);
  EigenSystem e;
  e.m = d.m;
  std::array<int, 4> order{0, 1, 2, 3};
  const auto& ev = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    return ev(a).imag() < ev(b).imag();
  });
  for (int k = 0; k < 4; ++k) {
    e.lambdas(k) = ev(order[k]);
    e.x.col(k) = solver.eigenvectors().col(order[k]);
  }
  return e;
}

}  // namespace

cplx expm1(cplx z) {
  const double x = z.real(), y = z.imag();
  if (y == 0.0) return {std::expm1(x), 0.0};
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

DriftMatrix make_drift(double g_plus, double g_minus, double kappa, double gamma) {
  DriftMatrix d;
  d.g_plus = g_plus;
  d.g_minus = g_minus;
  d.kappa = kappa;
  d.gamma = gamma;
  const cplx gm = I * g_minus, gp = I * g_plus;
  auto& m = d.m;
  m << -0.5 * kappa, 0.0, gm, gp,
       0.0, -0.5 * kappa, -gp, -gm,
       gm, gp, -0.5 * gamma, 0.0,
       -gp, -gm, 0.0, -0.5 * gamma;
  return d;
}

DriftMatrix build_drift(const model::SystemParams& params, const model::PulseSegment& segment) {
  const double g = model::effective_coupling(params, segment);
  switch (segment.kind) {
    case model::SegmentKind::Write:
      return make_drift(g, 0.0, params.kappa, params.gamma);
    case model::SegmentKind::Cool:
    case model::SegmentKind::Readout:
      return make_drift(0.0, g, params.kappa, params.gamma);
    case model::SegmentKind::Off:
      break;
  }
  return make_drift(0.0, 0.0, params.kappa, params.gamma);
}

double discriminant(const DriftMatrix& d) {
  const double dk = d.kappa - d.gamma;
  return 0.25 * dk * dk - 4.0 * (d.g_minus * d.g_minus - d.g_plus * d.g_plus);
}

EigenSystem diagonalize(const DriftMatrix& drift, const DiagonalizeOptions& opts) {
  const bool single = drift.g_plus == 0.0 || drift.g_minus == 0.0;
  EigenSystem e = single ? diagonalize_blocks(drift) : diagonalize_general(drift);

  const double scale = std::max(drift.kappa * drift.kappa, 1e-300);
  bool degenerate = std::abs(discriminant(drift)) < opts.degenerate_delta * scale &&
                    (drift.g_plus != 0.0 || drift.g_minus != 0.0);
  const double cond = condition_number(e.x);
  if (!(cond <= opts.max_condition)) degenerate = true;

  if (!degenerate) {
    e.x_inv = e.x.inverse();
    const Mat4 rebuilt = e.x * e.lambdas.asDiagonal() * e.x_inv;
    const double mmax = std::max(drift.m.cwiseAbs().maxCoeff(), 1e-300);
    if ((rebuilt - drift.m).cwiseAbs().maxCoeff() > 1e-10 * mmax) degenerate = true;
  }
  e.degenerate_flag = degenerate;
  if (degenerate) e.x_inv = Mat4::Identity();
  return e;
}

NoiseMatrix make_noise(double kappa, double gamma, double n_th) {
  NoiseMatrix n;
  n.n(A, Ad) = kappa;
  n.n(B, Bd) = gamma * (n_th + 1.0);
  n.n(Bd, B) = gamma * n_th;
  return n;
}

Mat4 propagator(const EigenSystem& eig, double dt) {
  if (dt == 0.0) return Mat4::Identity();
  if (eig.degenerate_flag) return (eig.m * dt).exp();
  Vec4 ex;
  for (int k = 0; k < 4; ++k) ex(k) = std::exp(eig.lambdas(k) * dt);
  return eig.x * ex.asDiagonal() * eig.x_inv;
}

Mat4 noise_integral(const EigenSystem& eig, const NoiseMatrix& noise, double t1, double t2,
                    double t_lower) {
  const double upper = std::min(t1, t2);
  if (!(t_lower <= upper)) throw UsageError("noise_integral: t_lower exceeds min(t1, t2)");
  const double len = upper - t_lower;
  if (len == 0.0) return Mat4::Zero();
  if (eig.degenerate_flag) return noise_integral_quadrature(eig, noise, t1, t2, t_lower);

  const Mat4 nt = eig.x_inv * noise.n.cast<cplx>() * eig.x_inv.transpose();
  Mat4 f;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const cplx li = eig.lambdas(i), lj = eig.lambdas(j);
      const cplx sigma = li + lj;
      const cplx z = sigma * len;
      const cplx prim = std::abs(z) < 1e-8 ? len * (1.0 + 0.5 * z) : expm1(z) / sigma;
      f(i, j) = nt(i, j) * std::exp(li * (t1 - upper) + lj * (t2 - upper)) * prim;
    }
  }
  return eig.x * f * eig.x.transpose();
}

Mat4 noise_integral_quadrature(const EigenSystem& eig, const NoiseMatrix& noise, double t1,
                               double t2, double t_lower, double rel_tol) {
  const double upper = std::min(t1, t2);
  if (!(t_lower <= upper)) throw UsageError("noise_integral: t_lower exceeds min(t1, t2)");
  if (upper == t_lower) return Mat4::Zero();
  const Mat4 n = noise.n.cast<cplx>();
  auto integrand = [&](double s) -> Mat4 {
    const Mat4 u1 = (eig.m * (t1 - s)).exp();
    const Mat4 u2 = (eig.m * (t2 - s)).exp();
    return u1 * n * u2.transpose();
  };
  return quad::gauss_kronrod<Mat4>(integrand, t_lower, upper, rel_tol, 1e-300);
}

CovarianceBlock thermal_block(double n_0, double t) {
  CovarianceBlock blk;
  blk.t1 = blk.t2 = t;
  blk.g(A, Ad) = 1.0;
  blk.g(B, Bd) = n_0 + 1.0;
  blk.g(Bd, B) = n_0;
  return blk;
}

BlockSet::BlockSet(std::vector<double> times, std::vector<Mat4> equal_time, std::vector<Mat4> steps,
                   model::DriveSchedule schedule)
    : times_(std::move(times)),
      equal_(std::move(equal_time)),
      steps_(std::move(steps)),
      schedule_(std::move(schedule)) {}

std::size_t BlockSet::index_of(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const double tol = 1e-10 * std::abs(t) + 1e-20;
  std::size_t best = times_.size();
  double best_d = INFINITY;
  for (auto cand : {it, it == times_.begin() ? it : it - 1}) {
    if (cand == times_.end()) continue;
    const double dist = std::abs(*cand - t);
    if (dist < best_d) {
      best_d = dist;
      best = static_cast<std::size_t>(cand - times_.begin());
    }
  }
  if (best == times_.size() || best_d > tol) throw UsageError("time is not a marked time");
  return best;
}

void BlockSet::add_anchor(std::size_t j) {
  if (j >= times_.size()) throw UsageError("anchor index out of range");
  if (anchor_slot_.empty()) anchor_slot_.assign(times_.size(), -1);
  if (anchor_slot_[j] >= 0) return;
  std::vector<Mat4> fwd;
  fwd.reserve(times_.size() - j);
  Mat4 u = Mat4::Identity();
  fwd.push_back(u);
  for (std::size_t k = j + 1; k < times_.size(); ++k) {
    u = steps_[k] * u;
    fwd.push_back(u);
  }
  anchor_slot_[j] = static_cast<int>(anchors_.size());
  anchors_.push_back(std::move(fwd));
}

Mat4 BlockSet::transfer(std::size_t i, std::size_t j) const {
  if (i < j) throw UsageError("transfer: i must not precede j");
  if (!anchor_slot_.empty() && anchor_slot_[j] >= 0) return anchors_[anchor_slot_[j]][i - j];
  Mat4 u = Mat4::Identity();
  for (std::size_t k = j + 1; k <= i; ++k) u = steps_[k] * u;
  return u;
}

CovarianceBlock BlockSet::block(std::size_t i, std::size_t j) const {
  CovarianceBlock blk;
  blk.t1 = times_[i];
  blk.t2 = times_[j];
  if (i == j)
    blk.g = equal_[i];
  else if (i > j)
    blk.g = transfer(i, j) * equal_[j];
  else
    blk.g = equal_[i] * transfer(j, i).transpose();
  return blk;
}

BlockSet evolve_schedule(const model::SystemParams& params, const model::DriveSchedule& schedule,
                         const CovarianceBlock& init, std::vector<double> marked_times) {
  return evolve_schedule(params, schedule, init, std::move(marked_times), EngineOptions{});
}

BlockSet evolve_schedule(const model::SystemParams& params, const model::DriveSchedule& schedule,
                         const CovarianceBlock& init, std::vector<double> marked,
                         const EngineOptions& opts) {
  if (schedule.size() == 0) throw UsageError("empty schedule");
  if (!std::is_sorted(marked.begin(), marked.end()))
    throw UsageError("marked times must be sorted");
  const double total = schedule.total_duration();
  const double slack = 1e-12 * total;
  for (double t : marked)
    if (!(t >= 0.0) || t > total + slack) throw UsageError("marked time outside schedule");
  marked.erase(std::unique(marked.begin(), marked.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::abs(b); }),
               marked.end());

  std::vector<EigenSystem> eigs;
  eigs.reserve(schedule.size());
  for (const auto& seg : schedule.segments())
    eigs.push_back(diagonalize(build_drift(params, seg), opts.diag));
  const NoiseMatrix noise = make_noise(params.kappa, params.gamma, params.n_th);

  std::vector<Mat4> equal, steps;
  equal.reserve(marked.size());
  steps.reserve(marked.size());
  Mat4 g = init.g;
  double t = 0.0;
  std::size_t s = 0;
  for (double tk : marked) {
    Mat4 step = Mat4::Identity();
    while (t < tk) {
      const double seg_end = schedule.end(s);
      const double te = std::min(tk, seg_end);
      const double dt = te - t;
      if (dt > 0.0) {
        const Mat4 u = propagator(eigs[s], dt);
        g = u * g * u.transpose() + noise_integral(eigs[s], noise, dt, dt, 0.0);
        step = u * step;
      }
      t = te;
      if (t >= seg_end) {
        if (s + 1 < schedule.size()) ++s;
        else break;
      }
    }
    equal.push_back(g);
    steps.push_back(step);
  }
  BlockSet set(std::move(marked), std::move(equal), std::move(steps), schedule);
  for (double ta : opts.anchors) set.add_anchor(set.index_of(ta));
  return set;
}

double commutator_error(const Mat4& g) {
  // [A_i, A_j] for the basis (a, a+, b, b+).
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  c(A, Ad) = 1.0;
  c(Ad, A) = -1.0;
  c(B, Bd) = 1.0;
  c(Bd, B) = -1.0;
  return (g - g.transpose() - c.cast<cplx>()).cwiseAbs().maxCoeff();
}

double hermitian_pair_error(const Mat4& g) {
  double err = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      err = std::max(err, std::abs(std::conj(g(i, j)) - g(j ^ 1, i ^ 1)));
  return err;
}

}  // namespace herald::cov
