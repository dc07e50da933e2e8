#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "phonon_herald/core_model.hpp"

namespace herald::analytic {

// Mechanical state after one detected Stokes photon, seeded by a thermal state.
// weights(n) = n (1-pbar)^2 pbar^(n-1).
struct ConditionalPhononState {
  double pbar = 0.0;

  double weight(std::size_t n) const;
  double mean() const;
};

// pbar = p e^{-2 gain}, p = n0/(1+n0); the factor follows from cosh r = e^{gain}.
ConditionalPhononState conditional_state(double n_0, double gain);

double g2_conditional_zero(double n_0, double gain);

// Herald projector 1 - |0><0| instead of |1><1|; Fock series summed until the
// tail bound drops below tail_tol.
double g2_conditional_zero_threshold_detector(double n_0, double gain, double tail_tol = 1e-12);

double herald_rate(double n_0, double gain);

// Amplitudes of |n_A, n_b = n_A> for n_A = 0..n_max (vacuum seed).
std::vector<std::complex<double>> write_state_amplitudes(double gain, std::size_t n_max);

double conversion_efficiency(double readout_gain);

struct CoolingSteadyState {
  double thermal = 0.0;
  double backaction = 0.0;
  double total() const { return thermal + backaction; }
};

CoolingSteadyState cooling_steady_state(const model::SystemParams& params, double n_r);

// 1/2 sqrt(g0^2 n_r - kappa^2/16) in rad/s, or nullopt when overdamped.
std::optional<double> rabi_frequency(const model::SystemParams& params, double n_r);

struct DlczEstimate {
  double t_ent = 0.0;
  double fidelity = 0.0;
  bool fidelity_clamped = false;
  double rep_rate = 0.0;
  double eta = 0.0;
  double gain = 0.0;
  double n_0 = 0.0;
};

DlczEstimate dlcz_estimate(double rep_rate, double gain, double eta, double n_0);

// Gain at which the first-order fidelity formula equals target.
double dlcz_gain_for_fidelity(double target, double eta, double n_0);

}  // namespace herald::analytic
