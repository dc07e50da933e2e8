#include "phonon_herald/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phonon_herald/errors.hpp"

namespace herald::analytic {

namespace {

void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0)) throw DomainError(std::string(what) + " must be >= 0");
}

}  // namespace

double ConditionalPhononState::weight(std::size_t n) const {
  if (n == 0) return 0.0;
  const double q = 1.0 - pbar;
  return q * q * static_cast<double>(n) * std::pow(pbar, static_cast<double>(n - 1));
}

double ConditionalPhononState::mean() const { return (1.0 + pbar) / (1.0 - pbar); }

ConditionalPhononState conditional_state(double n_0, double gain) {
  require_nonneg(n_0, "n_0");
  require_nonneg(gain, "gain");
  ConditionalPhononState s;
  const double p = std::isinf(n_0) ? 1.0 : n_0 / (1.0 + n_0);
  s.pbar = p * std::exp(-2.0 * gain);
  return s;
}

double g2_conditional_zero(double n_0, double gain) {
  const double pb = conditional_state(n_0, gain).pbar;
  return 2.0 * pb * (2.0 + pb) / ((1.0 + pb) * (1.0 + pb));
}

double g2_conditional_zero_threshold_detector(double n_0, double gain, double tail_tol) {
  require_nonneg(n_0, "n_0");
  require_nonneg(gain, "gain");
  if (gain == 0.0) return g2_conditional_zero(n_0, 0.0);
  if (std::isinf(n_0)) throw DivergenceError("threshold series diverges for infinite n_0");

  const double p = n_0 / (1.0 + n_0);
  const double c = std::exp(-2.0 * gain);
  const double t = -std::expm1(-2.0 * gain);  // tanh^2 r
  const double v = p * c;
  const double u = v + t;
  if (!(u < 1.0)) throw DivergenceError("threshold series ratio >= 1");

  // Unnormalized weight of m phonons: u^m - v^m, via d_m = u d_{m-1} + t v^{m-1}.
  double d = t;     // m = 1
  double vpow = 1;  // v^{m-1}
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  constexpr long kMaxTerms = 10'000'000;
  for (long m = 1; m <= kMaxTerms; ++m) {
    const double dm = static_cast<double>(m);
    s0 += d;
    s1 += dm * d;
    s2 += dm * (dm - 1.0) * d;

    // Terms behave like m^2 u^m; bound the remaining tail geometrically.
    const double q = u * ((dm + 2.0) / (dm + 1.0)) * ((dm + 2.0) / (dm + 1.0));
    if (q < 1.0 && m > 2) {
      const double next = (dm + 1.0) * dm * (u * d + t * vpow * v);
      const double tail = next / (1.0 - q);
      if (tail <= tail_tol * s2 && tail <= tail_tol * s1) break;
    }
    if (m == kMaxTerms) throw DivergenceError("threshold series did not converge");
    vpow *= v;
    d = u * d + t * vpow;
  }
  return s2 * s0 / (s1 * s1);
}

double herald_rate(double n_0, double gain) {
  require_nonneg(gain, "gain");
  return std::expm1(2.0 * gain) * (n_0 + 1.0);
}

std::vector<std::complex<double>> write_state_amplitudes(double gain, std::size_t n_max) {
  require_nonneg(gain, "gain");
  std::vector<std::complex<double>> amp(n_max + 1);
  const double tanh_r = std::sqrt(-std::expm1(-2.0 * gain));
  std::complex<double> phase{1.0, 0.0};
  double mag = std::exp(-gain);
  for (std::size_t n = 0; n <= n_max; ++n) {
    amp[n] = mag * phase;
    mag *= tanh_r;
    phase *= std::complex<double>{0.0, 1.0};
  }
  return amp;
}

double conversion_efficiency(double readout_gain) {
  require_nonneg(readout_gain, "readout gain");
  return -std::expm1(-2.0 * readout_gain);
}

CoolingSteadyState cooling_steady_state(const model::SystemParams& p, double n_r) {
  if (!(n_r > 0.0)) throw DomainError("cooling steady state needs n_r > 0");
  const double g2n4 = 4.0 * p.g0 * p.g0 * n_r;
  if (!(g2n4 < p.omega_m * p.omega_m))
    throw DomainError("4 g0^2 n_r must stay below Omega_m^2");
  const double k2 = p.kappa * p.kappa;
  CoolingSteadyState s;
  s.thermal = p.gamma * (g2n4 + k2) / (g2n4 * (p.kappa + p.gamma)) * p.n_th;
  s.backaction = (k2 + 2.0 * g2n4) / (16.0 * (p.omega_m * p.omega_m - g2n4));
  return s;
}

std::optional<double> rabi_frequency(const model::SystemParams& p, double n_r) {
  const double radicand = p.g0 * p.g0 * n_r - p.kappa * p.kappa / 16.0;
  if (radicand < 0.0) return std::nullopt;
  return 0.5 * std::sqrt(radicand);
}

DlczEstimate dlcz_estimate(double rep_rate, double gain, double eta, double n_0) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  if (!(rep_rate > 0.0)) throw DomainError("repetition rate must be > 0");
  if (!(gain > 0.0)) throw DomainError("zero gain: entanglement time is infinite");
  require_nonneg(n_0, "n_0");
  DlczEstimate e;
  e.rep_rate = rep_rate;
  e.gain = gain;
  e.eta = eta;
  e.n_0 = n_0;
  e.t_ent = 1.0 / (2.0 * rep_rate * 2.0 * gain * eta);
  const double f = (1.0 - 3.0 * 2.0 * gain * (1.0 - eta)) / (1.0 - n_0);
  e.fidelity = std::clamp(f, 0.0, 1.0);
  e.fidelity_clamped = (e.fidelity != f);
  return e;
}

double dlcz_gain_for_fidelity(double target, double eta, double n_0) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  const double gain = (1.0 - target * (1.0 - n_0)) / (6.0 * (1.0 - eta));
  if (!(gain > 0.0)) throw DomainError("target fidelity reachable at zero gain");
  return gain;
}

}  // namespace herald::analytic
