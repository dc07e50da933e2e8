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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace herald::model {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kHbar = 1.054571817e-34;  // J s

constexpr double hz_to_angular(double f_hz) { return kTwoPi * f_hz; }
constexpr double angular_to_hz(double w) { return w / kTwoPi; }

// All rates in rad/s.
struct SystemParams {
  double g0 = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double omega_m = 0.0;
  double omega_c = 0.0;
  double n_th = 0.0;
  double n_0 = 0.0;

  // Device defaults. kappa follows from 150 uW <-> n_r = 1e3 at 1550 nm;
  // gamma = 7.5e3 s^-1 gives (gamma n_th)^-1 ~ 20 us at n_th = 6.4.
  static SystemParams defaults();

  // Frequencies given as f/2pi in Hz.
  static SystemParams from_hz(double g0_hz, double kappa_hz, double gamma_hz,
                              double omega_m_hz, double omega_c_hz,
                              double n_th, double n_0);

  // Throws ConfigError when an invariant is broken.
  void validate() const;
};

enum class SegmentKind { Cool, Write, Off, Readout };
enum class Sideband { Upper, Lower };

std::string_view to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(std::string_view name);

struct PulseSegment {
  SegmentKind kind = SegmentKind::Off;
  double duration = 0.0;  // s
  double n_cavity = 0.0;

  bool drives_upper() const { return kind == SegmentKind::Write && n_cavity > 0.0; }
  bool drives_lower() const {
    return (kind == SegmentKind::Cool || kind == SegmentKind::Readout) && n_cavity > 0.0;
  }
};

class DriveSchedule {
 public:
  DriveSchedule() = default;
  explicit DriveSchedule(std::vector<PulseSegment> segments);

  const std::vector<PulseSegment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  const PulseSegment& operator[](std::size_t i) const { return segments_[i]; }

  double start(std::size_t i) const { return starts_[i]; }
  double end(std::size_t i) const { return starts_[i] + segments_[i].duration; }
  double total_duration() const { return total_; }

  // Half-open [start, end); t == total maps to the last segment.
  std::size_t segment_at(double t) const;

  // First segment of the given kind, or size() if none.
  std::size_t find_first(SegmentKind kind) const;

  // Closed-interval membership, used for herald/readout time checks.
  bool within(std::size_t i, double t) const;

 private:
  std::vector<PulseSegment> segments_;
  std::vector<double> starts_;
  double total_ = 0.0;
};

struct RegimeThresholds {
  double much_less = 0.1;
  double decoherence_budget = 0.25;
  double min_kappa_tw = 1.0;
  double max_n0 = 0.1;
};

struct RegimeReport {
  bool weak_coupling_ok = false;      // g0 << kappa
  bool sideband_resolved_ok = false;  // kappa << Omega_m
  bool decoherence_budget_ok = false;
  bool pulse_length_ok = false;       // T_w > 1/kappa
  bool ground_state_ok = false;       // n0 << 1

  double g0_over_kappa = 0.0;
  double kappa_over_omega_m = 0.0;
  double decoherence_margin = 0.0;  // (T_w + T_off) gamma n_th
  double kappa_tw = 0.0;
  double n_0 = 0.0;

  // Two readings of (gamma n_th)^-1: gamma taken as stored (rad/s), and
  // gamma/2pi taken as the rate.
  double thermal_time = 0.0;
  double thermal_time_cycles = 0.0;

  bool all_ok() const {
    return weak_coupling_ok && sideband_resolved_ok && decoherence_budget_ok &&
           pulse_length_ok && ground_state_ok;
  }
};

double effective_coupling(const SystemParams& params, const PulseSegment& segment);

double power_to_photon_number(const SystemParams& params, double power, Sideband sideband);
double photon_number_to_power(const SystemParams& params, double n, Sideband sideband);

double tilde_gain(const SystemParams& params, const PulseSegment& segment);

RegimeReport validate_regime(const SystemParams& params, const DriveSchedule& schedule,
                             const RegimeThresholds& thresholds = {});

// Write / off / readout, the standard heralding sequence.
DriveSchedule heralding_schedule(double t_write, double n_write, double t_off,
                                 double t_readout, double n_readout);

}  // namespace herald::model
