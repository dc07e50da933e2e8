#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "phonon_herald/covariance.hpp"

namespace herald::corr {

struct OpAt {
  double time = 0.0;
  cov::Op op = cov::A;
};

// Operators in the order they appear in the expectation value.
using MomentRequest = std::vector<OpAt>;

using Pairing = std::vector<std::pair<int, int>>;

// All perfect matchings of {0..n-1}, each pair (i<j); n even.
std::vector<Pairing> perfect_matchings(int n);

// Wick expansion; each pair keeps the left-to-right order of the request.
std::complex<double> gaussian_moment(const cov::BlockSet& blocks, const MomentRequest& request);

enum class CorrelationKind { G1, G2, G3, g1_norm, g2_cond };

struct CorrelationRecord {
  CorrelationKind kind = CorrelationKind::G1;
  std::vector<double> times;
  double value = 0.0;
  std::optional<double> conditioning;  // herald time t_w
};

inline constexpr double kDenominatorFloor = 1e-30;

// Photon-photon moments in the operator order <a+(t'') a+(t') a+(t) a(t) a(t') a(t'')>.
CorrelationRecord intensity_G1(const cov::BlockSet& blocks, double t);
CorrelationRecord intensity_G2(const cov::BlockSet& blocks, double t, double t_prime);
CorrelationRecord intensity_G3(const cov::BlockSet& blocks, double t, double t_prime,
                               double t_second);

// Heralded intensity correlation at readout times t_r and t_r + tau.
CorrelationRecord conditional_g2(const cov::BlockSet& blocks, double t_w, double t_r, double tau);

// <a+(t_w) a+(t_r) a(t_r+tau) a(t_w)> / <a+(t_w) a(t_w)>.
std::complex<double> conditional_field(const cov::BlockSet& blocks, double t_w, double t_r,
                                       double tau);

// |G1_cond(t_r, t_r+tau)| / sqrt(n_cond(t_r) n_cond(t_r+tau)).
CorrelationRecord conditional_g1(const cov::BlockSet& blocks, double t_w, double t_r, double tau);

// |G1_cond(t_r, t_r+tau)| / G1_cond(t_r, t_r); the wavepacket's own decay.
CorrelationRecord conditional_g1_zero_delay(const cov::BlockSet& blocks, double t_w, double t_r,
                                            double tau);

// First delay where the non-increasing upper envelope of |values| drops below
// 1/e, linearly interpolated. Throws NotConvergedError without a crossing.
double coherence_time(const std::vector<double>& taus, const std::vector<double>& values);

inline double linewidth_from_coherence_time(double tc) { return 1.0 / (3.14159265358979323846 * tc); }

// Indices of strict local maxima (interior points only).
std::vector<std::size_t> local_maxima(const std::vector<double>& values, double min_prominence = 0.0);

}  // namespace herald::corr
