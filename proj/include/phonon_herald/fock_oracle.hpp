#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "phonon_herald/core_model.hpp"

namespace herald::fock {

// Dense two-mode density matrix; index = n_a * (N_b + 1) + n_b.
struct TruncatedState {
  Eigen::MatrixXcd rho;
  int n_a_max = 0;
  int n_b_max = 0;
  double leakage = 0.0;  // population at the cutoff levels

  int dim() const { return (n_a_max + 1) * (n_b_max + 1); }
  int index(int na, int nb) const { return na * (n_b_max + 1) + nb; }
};

TruncatedState product_thermal(int n_a_max, int n_b_max, double n_a, double n_b);
double cutoff_population(const TruncatedState& s);

struct StateDiagnostics {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};
StateDiagnostics diagnose(const TruncatedState& s);

// H = -(g+ (a+ b+ + a b) + g- (a+ b + a b+)); dissipators kappa D[a],
// gamma(n_th+1) D[b], gamma n_th D[b+].
struct OracleRates {
  double g_plus = 0.0;
  double g_minus = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double n_th = 0.0;
};

OracleRates rates_for(const model::SystemParams& params, const model::PulseSegment& segment);

struct OracleOptions {
  double local_tolerance = 1e-11;
  double leakage_bound = 1e-6;
};

TruncatedState lindblad_evolve(const TruncatedState& state, const OracleRates& rates, double dt,
                               const OracleOptions& opts = {});
TruncatedState lindblad_evolve(const TruncatedState& state, const model::SystemParams& params,
                               const model::PulseSegment& segment, double dt,
                               const OracleOptions& opts = {});

// Lossless two-mode squeezing with cosh r = e^{gain}: the temporal-mode write.
TruncatedState ideal_write(const TruncatedState& state, double gain, const OracleOptions& opts = {});
// Lossless beam-splitter swap of optics and mechanics.
TruncatedState ideal_swap(const TruncatedState& state, const OracleOptions& opts = {});

enum class Detector { Projector1, Threshold };

struct ClickResult {
  TruncatedState state;  // optical vacuum (x) conditioned mechanics
  double click_probability = 0.0;
};

ClickResult condition_on_click(const TruncatedState& state, Detector detector);

// Point-detection herald a rho a+ / <a+ a>, optics kept; click_probability
// holds <a+ a>. This is the herald the covariance engine's moments describe.
ClickResult herald_annihilation(const TruncatedState& state);

std::vector<double> mechanical_diagonal(const TruncatedState& s);
std::vector<double> joint_number_distribution(const TruncatedState& s);  // by index()

enum class Ladder { A, Ad, B, Bd };

// tr(o_1 o_2 ... o_n rho).
std::complex<double> expectation(const TruncatedState& s, const std::vector<Ladder>& ops);

// <a+ a+ a a>/<a+ a>^2 after evolving the conditioned state through the
// readout segment.
double oracle_g2(const TruncatedState& state_after_click, const model::SystemParams& params,
                 const model::PulseSegment& readout_segment, const OracleOptions& opts = {});

// Equal-time optical g2 of a state as is.
double optical_g2(const TruncatedState& s);

}  // namespace herald::fock
