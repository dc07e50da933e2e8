/**
 * Copyright 2024 The phonon-herald Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "phonon_herald/core_model.hpp"

namespace herald::cov {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

// Operator basis (a, a+, b, b+); every 4x4 layout below uses these indices.
enum Op : int { A = 0, Ad = 1, B = 2, Bd = 3 };

// dA/dt = M A + noise.
struct DriftMatrix {
  Mat4 m = Mat4::Zero();
  double g_plus = 0.0;
  double g_minus = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
};

DriftMatrix make_drift(double g_plus, double g_minus, double kappa, double gamma);
DriftMatrix build_drift(const model::SystemParams& params, const model::PulseSegment& segment);

// Discriminant (kappa-gamma)^2/4 - 4(g-^2 - g+^2).
double discriminant(const DriftMatrix& drift);

struct EigenSystem {
  Vec4 lambdas = Vec4::Zero();
  Mat4 x = Mat4::Identity();
  Mat4 x_inv = Mat4::Identity();
  bool degenerate_flag = false;
  Mat4 m = Mat4::Zero();  // kept for the matrix-exponential fallback
};

struct DiagonalizeOptions {
  double degenerate_delta = 1e-12;  // relative to kappa^2
  double max_condition = 1e8;
};

EigenSystem diagonalize(const DriftMatrix& drift, const DiagonalizeOptions& opts = {});

// Nonzero entries: (a,a+) kappa, (b,b+) gamma(n_th+1), (b+,b) gamma n_th.
struct NoiseMatrix {
  Eigen::Matrix4d n = Eigen::Matrix4d::Zero();
};

NoiseMatrix make_noise(double kappa, double gamma, double n_th);

Mat4 propagator(const EigenSystem& eig, double dt);

// Integral over t' in [t_lower, min(t1,t2)] of U(t1-t') N U^T(t2-t'), times
// local to one segment.
Mat4 noise_integral(const EigenSystem& eig, const NoiseMatrix& noise, double t1, double t2,
                    double t_lower);

// Same integral by adaptive quadrature; fallback path and test oracle.
Mat4 noise_integral_quadrature(const EigenSystem& eig, const NoiseMatrix& noise, double t1,
                               double t2, double t_lower, double rel_tol = 1e-12);

struct CovarianceBlock {
  double t1 = 0.0;
  double t2 = 0.0;
  Mat4 g = Mat4::Zero();  // g(i,j) = <A_i(t1) A_j(t2)>
};

// Optical vacuum times mechanical thermal state at occupancy n_0.
CovarianceBlock thermal_block(double n_0, double t = 0.0);

// Equal-time blocks at marked times plus the propagators linking consecutive
// marked times; cross-time blocks are composed on request.
class BlockSet {
 public:
  BlockSet() = default;
  BlockSet(std::vector<double> times, std::vector<Mat4> equal_time, std::vector<Mat4> steps,
           model::DriveSchedule schedule = {});

  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  double time(std::size_t i) const { return times_[i]; }

  // Throws UsageError when t is not a marked time.
  std::size_t index_of(double t) const;

  const Mat4& equal_time(std::size_t i) const { return equal_[i]; }
  // Homogeneous propagator from marked time j to marked time i >= j.
  Mat4 transfer(std::size_t i, std::size_t j) const;
  CovarianceBlock block(std::size_t i, std::size_t j) const;
  CovarianceBlock block_at(double t1, double t2) const { return block(index_of(t1), index_of(t2)); }

  // Schedule the set was produced from (empty when built by hand).
  const model::DriveSchedule& schedule() const { return schedule_; }

  // Caches transfer(i, j) for every i >= j; later lookups are O(1).
  void add_anchor(std::size_t j);

 private:
  std::vector<double> times_;
  std::vector<Mat4> equal_;
  std::vector<Mat4> steps_;  // steps_[k]: marked time k-1 -> k (identity for k = 0)
  model::DriveSchedule schedule_;
  std::vector<int> anchor_slot_;
  std::vector<std::vector<Mat4>> anchors_;
};

// marked_times: sorted, within [0, total]. Duplicates are merged.
BlockSet evolve_schedule(const model::SystemParams& params, const model::DriveSchedule& schedule,
                         const CovarianceBlock& init, std::vector<double> marked_times);

struct EngineOptions {
  DiagonalizeOptions diag;
  std::vector<double> anchors;  // marked times whose forward propagators get cached
};

BlockSet evolve_schedule(const model::SystemParams& params, const model::DriveSchedule& schedule,
                         const CovarianceBlock& init, std::vector<double> marked_times,
                         const EngineOptions& opts);

// Invariant checks on an equal-time block.
double commutator_error(const Mat4& g);
double hermitian_pair_error(const Mat4& g);

// e^z - 1 with full relative accuracy near z = 0.
cplx expm1(cplx z);

}  // namespace herald::cov
