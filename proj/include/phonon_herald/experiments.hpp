#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phonon_herald/config.hpp"
#include "phonon_herald/csv.hpp"
#include "phonon_herald/covariance.hpp"

namespace herald::exp {

io::CsvTable run_job(const FigureJob& job);

io::CsvTable run_fig1e(const FigureJob& job);
io::CsvTable run_fig2(const FigureJob& job);  // Fig2a or Fig2b
io::CsvTable run_fig3(const FigureJob& job);  // Fig3a, Fig3b or Fig3c
io::CsvTable run_figS1(const FigureJob& job);
io::CsvTable run_dlcz(const FigureJob& job);
io::CsvTable run_oracle_compare(const FigureJob& job);
io::CsvTable run_g2_curve(const FigureJob& job);
io::CsvTable run_validate(const FigureJob& job);

// Shared pipeline pieces.

double default_herald_time(const model::DriveSchedule& schedule);
double readout_start(const model::DriveSchedule& schedule);

// Off segment after the first write set to t_off (removed when 0, inserted
// when missing).
model::DriveSchedule with_off(const model::DriveSchedule& base, double t_off);
// First readout set to n_r and stretched to at least min_duration.
model::DriveSchedule with_readout(const model::DriveSchedule& base, std::optional<double> n_r,
                                  double min_duration);

struct DelayCurve {
  std::vector<double> taus;
  std::vector<double> g2;
  std::vector<double> g1_norm;
  std::vector<double> g1_zero_delay;
};

// Heralded curves at readout times t_r (relative to readout start) + tau.
DelayCurve conditional_curve(const model::SystemParams& params, const model::DriveSchedule& schedule,
                             double t_w, double t_r, const std::vector<double>& taus, bool with_g1);

double conditional_g2_zero(const model::SystemParams& params, const model::DriveSchedule& schedule,
                           double t_w, double t_r);

// Intensity-oscillation period pi/omega of the readout drift, or nullopt if
// the readout is overdamped.
std::optional<double> readout_oscillation_period(const model::SystemParams& params, double n_r);
// Slowest amplitude decay rate of the readout drift (1/s).
double readout_decay_rate(const model::SystemParams& params, double n_r);

std::vector<double> fig3_tau_grid(const model::SystemParams& params, double n_r, int min_points,
                                  int points_per_period);

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);

// Mean spacing of local maxima; nullopt with fewer than two.
std::optional<double> mean_maxima_spacing(const std::vector<double>& taus,
                                          const std::vector<double>& values, double prominence);

}  // namespace herald::exp
