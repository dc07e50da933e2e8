#include "phonon_herald/core_model.hpp"

#include <algorithm>
#include <cmath>

#include "phonon_herald/errors.hpp"

namespace herald::model {

SystemParams SystemParams::defaults() {
  SystemParams p;
  p.g0 = hz_to_angular(1.0e6);
  p.kappa = hz_to_angular(0.14e9);
  p.gamma = 7.5e3;
  p.omega_m = hz_to_angular(5.1e9);
  p.omega_c = hz_to_angular(299792458.0 / 1550e-9);
  p.n_th = 6.4;
  p.n_0 = 0.01;
  return p;
}

SystemParams SystemParams::from_hz(double g0_hz, double kappa_hz, double gamma_hz,
                                   double omega_m_hz, double omega_c_hz, double n_th,
                                   double n_0) {
  SystemParams p;
  p.g0 = hz_to_angular(g0_hz);
  p.kappa = hz_to_angular(kappa_hz);
  p.gamma = hz_to_angular(gamma_hz);
  p.omega_m = hz_to_angular(omega_m_hz);
  p.omega_c = hz_to_angular(omega_c_hz);
  p.n_th = n_th;
  p.n_0 = n_0;
  return p;
}

void SystemParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("system.") + name + " must be a positive finite rate");
  };
  positive(g0, "g0");
  positive(kappa, "kappa");
  positive(gamma, "gamma");
  positive(omega_m, "omega_m");
  positive(omega_c, "omega_c");
  if (!(n_0 >= 0.0) || !std::isfinite(n_0)) throw ConfigError("system.n_0 must be >= 0");
  if (!(n_th >= n_0) || !std::isfinite(n_th)) throw ConfigError("system.n_th must be >= n_0");
}

std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::Cool: return "cool";
    case SegmentKind::Write: return "write";
    case SegmentKind::Off: return "off";
    case SegmentKind::Readout: return "readout";
  }
  return "off";
}

SegmentKind segment_kind_from_string(std::string_view name) {
  if (name == "cool") return SegmentKind::Cool;
  if (name == "write") return SegmentKind::Write;
  if (name == "off") return SegmentKind::Off;
  if (name == "readout") return SegmentKind::Readout;
  throw ScheduleError("unknown segment kind '" + std::string(name) + "'");
}

DriveSchedule::DriveSchedule(std::vector<PulseSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw ScheduleError("schedule has no segments");
  starts_.reserve(segments_.size());
  double t = 0.0;
  for (const auto& s : segments_) {
    if (!(s.duration > 0.0) || !std::isfinite(s.duration))
      throw ScheduleError("segment '" + std::string(to_string(s.kind)) + "' needs a positive duration");
    if (!(s.n_cavity >= 0.0) || !std::isfinite(s.n_cavity))
      throw ScheduleError("segment photon number must be >= 0");
    if (s.kind == SegmentKind::Off && s.n_cavity != 0.0)
      throw ScheduleError("off segments carry no drive (n_cavity must be 0)");
    starts_.push_back(t);
    t += s.duration;
  }
  total_ = t;
}

std::size_t DriveSchedule::segment_at(double t) const {
  if (!(t >= 0.0) || t > total_)
    throw UsageError("time outside schedule");
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  return static_cast<std::size_t>(it - starts_.begin()) - 1;
}

std::size_t DriveSchedule::find_first(SegmentKind kind) const {
  for (std::size_t i = 0; i < segments_.size(); ++i)
    if (segments_[i].kind == kind) return i;
  return segments_.size();
}

bool DriveSchedule::within(std::size_t i, double t) const {
  const double slack = 1e-12 * std::max(1e-9, total_);
  return t >= start(i) - slack && t <= end(i) + slack;
}

double effective_coupling(const SystemParams& params, const PulseSegment& segment) {
  if (segment.kind == SegmentKind::Off) return 0.0;
  return params.g0 * std::sqrt(segment.n_cavity);
}

double power_to_photon_number(const SystemParams& params, double power, Sideband) {
  // Both sidebands sit Omega_m away from the cavity, so the Lorentzian is symmetric.
  const double lorentz = params.omega_m * params.omega_m + 0.25 * params.kappa * params.kappa;
  return params.kappa * power / (kHbar * params.omega_c * lorentz);
}

double photon_number_to_power(const SystemParams& params, double n, Sideband) {
  const double lorentz = params.omega_m * params.omega_m + 0.25 * params.kappa * params.kappa;
  return n * kHbar * params.omega_c * lorentz / params.kappa;
}

double tilde_gain(const SystemParams& params, const PulseSegment& segment) {
  const double g = effective_coupling(params, segment);
  return 2.0 * g * g / params.kappa;
}

RegimeReport validate_regime(const SystemParams& params, const DriveSchedule& schedule,
                             const RegimeThresholds& th) {
  const std::size_t iw = schedule.find_first(SegmentKind::Write);
  if (iw == schedule.size()) throw ScheduleError("schedule has no write segment");
  const double t_write = schedule[iw].duration;
  double t_off = 0.0;
  for (std::size_t i = iw + 1; i < schedule.size() && schedule[i].kind == SegmentKind::Off; ++i)
    t_off += schedule[i].duration;

  RegimeReport r;
  r.g0_over_kappa = params.g0 / params.kappa;
  r.kappa_over_omega_m = params.kappa / params.omega_m;
  r.decoherence_margin = (t_write + t_off) * params.gamma * params.n_th;
  r.kappa_tw = params.kappa * t_write;
  r.n_0 = params.n_0;
  r.thermal_time = params.n_th > 0.0 ? 1.0 / (params.gamma * params.n_th) : INFINITY;
  r.thermal_time_cycles = params.n_th > 0.0 ? kTwoPi / (params.gamma * params.n_th) : INFINITY;

  r.weak_coupling_ok = r.g0_over_kappa < th.much_less;
  r.sideband_resolved_ok = r.kappa_over_omega_m < th.much_less;
  r.decoherence_budget_ok = r.decoherence_margin <= th.decoherence_budget;
  r.pulse_length_ok = r.kappa_tw > th.min_kappa_tw;
  r.ground_state_ok = r.n_0 < th.max_n0;
  return r;
}

DriveSchedule heralding_schedule(double t_write, double n_write, double t_off, double t_readout,
                                 double n_readout) {
  std::vector<PulseSegment> segs;
  segs.push_back({SegmentKind::Write, t_write, n_write});
  if (t_off > 0.0) segs.push_back({SegmentKind::Off, t_off, 0.0});
  segs.push_back({SegmentKind::Readout, t_readout, n_readout});
  return DriveSchedule(std::move(segs));
}

}  // namespace herald::model
