#include "phonon_herald/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "phonon_herald/errors.hpp"

namespace herald::fock {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;

namespace {

// Ladder operators act as index shifts, so each application is O(dim^2).
class Shifts {
 public:
  explicit Shifts(const TruncatedState& s) : na_max_(s.n_a_max), nb_max_(s.n_b_max) {}

  int idx(int na, int nb) const { return na * (nb_max_ + 1) + nb; }

  // Source index and factor for (L X) row r, or -1.
  std::pair<int, double> row_source(Ladder l, int r) const {
    const int na = r / (nb_max_ + 1), nb = r % (nb_max_ + 1);
    switch (l) {
      case Ladder::A: return na < na_max_ ? std::pair{idx(na + 1, nb), std::sqrt(na + 1.0)} : std::pair{-1, 0.0};
      case Ladder::Ad: return na > 0 ? std::pair{idx(na - 1, nb), std::sqrt(double(na))} : std::pair{-1, 0.0};
      case Ladder::B: return nb < nb_max_ ? std::pair{idx(na, nb + 1), std::sqrt(nb + 1.0)} : std::pair{-1, 0.0};
      case Ladder::Bd: return nb > 0 ? std::pair{idx(na, nb - 1), std::sqrt(double(nb))} : std::pair{-1, 0.0};
    }
    return {-1, 0.0};
  }

  // (X L) column c takes column src of X: the transpose action of L.
  std::pair<int, double> col_source(Ladder l, int c) const {
    switch (l) {
      case Ladder::A: return row_source(Ladder::Ad, c);
      case Ladder::Ad: return row_source(Ladder::A, c);
      case Ladder::B: return row_source(Ladder::Bd, c);
      case Ladder::Bd: return row_source(Ladder::B, c);
    }
    return {-1, 0.0};
  }

  MatrixXcd left(Ladder l, const MatrixXcd& x) const {
    MatrixXcd out = MatrixXcd::Zero(x.rows(), x.cols());
    for (int r = 0; r < x.rows(); ++r) {
      auto [src, f] = row_source(l, r);
      if (src >= 0) out.row(r) = f * x.row(src);
    }
    return out;
  }

  MatrixXcd right(const MatrixXcd& x, Ladder l) const {
    MatrixXcd out = MatrixXcd::Zero(x.rows(), x.cols());
    for (int c = 0; c < x.cols(); ++c) {
      auto [src, f] = col_source(l, c);
      if (src >= 0) out.col(c) = f * x.col(src);
    }
    return out;
  }

 private:
  int na_max_, nb_max_;
};

using SpMat = Eigen::SparseMatrix<cplx>;

SpMat ladder_matrix(const TruncatedState& s, Ladder l) {
  const Shifts sh(s);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int r = 0; r < s.dim(); ++r) {
    auto [src, f] = sh.row_source(l, r);
    if (src >= 0) trip.emplace_back(r, src, f);
  }
  SpMat m(s.dim(), s.dim());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// d rho/dt = K rho + rho K+ + sum_j L_j rho L_j+, K = -i H - (1/2) sum_j L_j+ L_j.
struct Generator {
  SpMat k;
  std::vector<std::pair<SpMat, SpMat>> jumps;  // (L, L+)
};

Generator make_generator(const TruncatedState& s, const OracleRates& r) {
  const SpMat a = ladder_matrix(s, Ladder::A), ad = ladder_matrix(s, Ladder::Ad);
  const SpMat b = ladder_matrix(s, Ladder::B), bd = ladder_matrix(s, Ladder::Bd);
  SpMat h = -r.g_plus * SpMat(ad * bd + a * b) - r.g_minus * SpMat(ad * b + a * bd);
  Generator g;
  g.k = cplx{0.0, -1.0} * h;
  auto add_jump = [&](double rate, const SpMat& l, const SpMat& ld) {
    if (rate == 0.0) return;
    const double f = std::sqrt(rate);
    g.jumps.emplace_back(f * l, f * ld);
    g.k -= 0.5 * rate * SpMat(ld * l);
  };
  add_jump(r.kappa, a, ad);
  add_jump(r.gamma * (r.n_th + 1.0), b, bd);
  add_jump(r.gamma * r.n_th, bd, b);
  g.k.makeCompressed();
  return g;
}

MatrixXcd rhs(const Generator& g, const MatrixXcd& rho) {
  MatrixXcd x = g.k * rho;
  MatrixXcd out = x + x.adjoint();
  for (const auto& [l, ld] : g.jumps) {
    x.noalias() = l * rho;
    out.noalias() += x * ld;
  }
  return out;
}

MatrixXcd rk4_step(const Generator& g, const MatrixXcd& rho, double h) {
  const MatrixXcd k1 = rhs(g, rho);
  const MatrixXcd k2 = rhs(g, rho + 0.5 * h * k1);
  const MatrixXcd k3 = rhs(g, rho + 0.5 * h * k2);
  const MatrixXcd k4 = rhs(g, rho + h * k3);
  return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

TruncatedState product_thermal(int n_a_max, int n_b_max, double n_a, double n_b) {
  TruncatedState s;
  s.n_a_max = n_a_max;
  s.n_b_max = n_b_max;
  s.rho = MatrixXcd::Zero(s.dim(), s.dim());
  auto thermal = [](double n, int k) { return std::pow(n / (1.0 + n), k) / (1.0 + n); };
  for (int na = 0; na <= n_a_max; ++na)
    for (int nb = 0; nb <= n_b_max; ++nb) {
      const int i = s.index(na, nb);
      s.rho(i, i) = thermal(n_a, na) * thermal(n_b, nb);
    }
  s.rho /= s.rho.trace().real();
  s.leakage = cutoff_population(s);
  return s;
}

double cutoff_population(const TruncatedState& s) {
  double p = 0.0;
  for (int na = 0; na <= s.n_a_max; ++na)
    for (int nb = 0; nb <= s.n_b_max; ++nb)
      if (na == s.n_a_max || nb == s.n_b_max) p += s.rho(s.index(na, nb), s.index(na, nb)).real();
  return p;
}

StateDiagnostics diagnose(const TruncatedState& s) {
  StateDiagnostics d;
  d.trace_error = std::abs(s.rho.trace() - cplx{1.0, 0.0});
  d.hermiticity_error = (s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff();
  const MatrixXcd herm = 0.5 * (s.rho + s.rho.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

OracleRates rates_for(const model::SystemParams& params, const model::PulseSegment& segment) {
  OracleRates r;
  const double g = model::effective_coupling(params, segment);
  if (segment.kind == model::SegmentKind::Write) r.g_plus = g;
  if (segment.kind == model::SegmentKind::Cool || segment.kind == model::SegmentKind::Readout)
    r.g_minus = g;
  r.kappa = params.kappa;
  r.gamma = params.gamma;
  r.n_th = params.n_th;
  return r;
}

TruncatedState lindblad_evolve(const TruncatedState& state, const OracleRates& k, double dt,
                               const OracleOptions& opts) {
  if (!(dt > 0.0)) throw UsageError("lindblad_evolve needs dt > 0");
  if (k.g_plus != 0.0 && k.g_minus != 0.0) throw UsageError("one sideband per segment");
  const Generator gen = make_generator(state, k);
  const double fastest = k.kappa * state.n_a_max + k.gamma * (2.0 * k.n_th + 1.0) * (state.n_b_max + 1) +
                         (std::abs(k.g_plus) + std::abs(k.g_minus)) * (state.n_a_max + state.n_b_max + 2);
  double h = fastest > 0.0 ? std::min(dt, 0.1 / fastest) : dt;

  MatrixXcd rho = state.rho;
  double t = 0.0;
  int guard = 0;
  while (t < dt) {
    if (++guard > 50'000'000) throw NotConvergedError("oracle integrator made no progress");
    h = std::min(h, dt - t);
    const MatrixXcd full = rk4_step(gen, rho, h);
    const MatrixXcd half = rk4_step(gen, rk4_step(gen, rho, 0.5 * h), 0.5 * h);
    const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    if (err <= opts.local_tolerance || h <= 1e-14 * dt) {
      rho = half + (half - full) / 15.0;
      rho = 0.5 * (rho + rho.adjoint());
      t += h;
    }
    const double fac = err > 0.0 ? 0.9 * std::pow(opts.local_tolerance / err, 0.2) : 4.0;
    h *= std::clamp(fac, 0.2, 4.0);
  }

  TruncatedState out = state;
  out.rho = rho;
  out.leakage = cutoff_population(out);
  if (out.leakage > opts.leakage_bound)
    throw TruncationError("oracle cutoff population " + std::to_string(out.leakage) +
                          " exceeds bound");
  return out;
}

TruncatedState lindblad_evolve(const TruncatedState& state, const model::SystemParams& params,
                               const model::PulseSegment& segment, double dt,
                               const OracleOptions& opts) {
  return lindblad_evolve(state, rates_for(params, segment), dt, opts);
}

TruncatedState ideal_write(const TruncatedState& state, double gain, const OracleOptions& opts) {
  if (gain == 0.0) return state;
  OracleRates k;
  k.g_plus = std::acosh(std::exp(gain));
  return lindblad_evolve(state, k, 1.0, opts);
}

TruncatedState ideal_swap(const TruncatedState& state, const OracleOptions& opts) {
  OracleRates k;
  k.g_minus = 0.5 * 3.14159265358979323846;
  return lindblad_evolve(state, k, 1.0, opts);
}

ClickResult condition_on_click(const TruncatedState& state, Detector detector) {
  const int na_lo = 1;
  const int na_hi = detector == Detector::Projector1 ? std::min(1, state.n_a_max) : state.n_a_max;
  const int nbd = state.n_b_max + 1;
  MatrixXcd rho_b = MatrixXcd::Zero(nbd, nbd);
  for (int na = na_lo; na <= na_hi; ++na)
    rho_b += state.rho.block(state.index(na, 0), state.index(na, 0), nbd, nbd);
  const double prob = rho_b.trace().real();
  if (!(prob > 1e-12)) throw ConditioningError("click probability is negligible");

  ClickResult res;
  res.click_probability = prob;
  res.state = state;
  res.state.rho = MatrixXcd::Zero(state.dim(), state.dim());
  res.state.rho.block(0, 0, nbd, nbd) = rho_b / prob;
  res.state.leakage = cutoff_population(res.state);
  return res;
}

ClickResult herald_annihilation(const TruncatedState& state) {
  const Shifts sh(state);
  MatrixXcd x = sh.right(sh.left(Ladder::A, state.rho), Ladder::Ad);
  const double prob = x.trace().real();
  if (!(prob > 1e-12)) throw ConditioningError("click probability is negligible");
  ClickResult res;
  res.click_probability = prob;
  res.state = state;
  res.state.rho = x / prob;
  res.state.leakage = cutoff_population(res.state);
  return res;
}

std::vector<double> mechanical_diagonal(const TruncatedState& s) {
  std::vector<double> d(static_cast<std::size_t>(s.n_b_max + 1), 0.0);
  for (int na = 0; na <= s.n_a_max; ++na)
    for (int nb = 0; nb <= s.n_b_max; ++nb) d[nb] += s.rho(s.index(na, nb), s.index(na, nb)).real();
  return d;
}

std::vector<double> joint_number_distribution(const TruncatedState& s) {
  std::vector<double> d(static_cast<std::size_t>(s.dim()));
  for (int i = 0; i < s.dim(); ++i) d[i] = s.rho(i, i).real();
  return d;
}

cplx expectation(const TruncatedState& s, const std::vector<Ladder>& ops) {
  const Shifts sh(s);
  MatrixXcd x = s.rho;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) x = sh.left(*it, x);
  return x.trace();
}

double optical_g2(const TruncatedState& s) {
  const double n = expectation(s, {Ladder::Ad, Ladder::A}).real();
  if (!(n > 1e-300)) throw ConditioningError("optical mode is empty");
  const double nn = expectation(s, {Ladder::Ad, Ladder::Ad, Ladder::A, Ladder::A}).real();
  return nn / (n * n);
}

double oracle_g2(const TruncatedState& state_after_click, const model::SystemParams& params,
                 const model::PulseSegment& readout_segment, const OracleOptions& opts) {
  const TruncatedState out =
      lindblad_evolve(state_after_click, params, readout_segment, readout_segment.duration, opts);
  return optical_g2(out);
}

}  // namespace herald::fock
