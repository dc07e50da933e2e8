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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phonon_herald/core_model.hpp"

namespace herald::exp {

enum class FigureId { Fig1e, Fig2a, Fig2b, Fig3a, Fig3b, Fig3c, FigS1, Dlcz, OracleCompare, G2, Validate };

std::string_view to_string(FigureId id);
FigureId figure_from_string(std::string_view name);

struct SweepSpec {
  std::optional<double> t_w;  // absolute herald time; default end of the first write
  double t_r = 1e-9;          // relative to the readout start
  double tau_max = 200e-9;
  int tau_points = 201;

  std::vector<double> t_off = {5e-9, 100e-9, 1e-6, 5e-6, 20e-6, 100e-6, 500e-6};
  double t_off_min = 1e-9;
  double t_off_max = 1e-3;
  int t_off_points = 31;
  std::vector<double> n_th = {6.4, 3.2, 1.6, 0.8, 0.4};

  std::vector<double> n_r = {1.0, 3.1622776601683795, 10.0, 31.622776601683793, 100.0,
                             316.22776601683796, 1000.0, 3162.2776601683795, 10000.0,
                             31622.776601683792, 100000.0};
  int points_per_period = 20;
  double fig3c_tau_max = 40e-9;

  std::vector<double> gains = {1e-3, 1e-2, 5e-2, 1e-1};
  double n0_min = 1e-4;
  double n0_max = 1.0;
  int n0_points = 41;

  double t_max = 200e-9;
  int t_points = 201;

  double rep_rate = 10e6;
  double eta_collection = 0.5;
  double eta_fiber = 0.6;
  double eta_detection = 0.2;
  double target_fidelity = 0.9;
  double dlcz_n_0 = 0.0;

  int oracle_na = 5;
  int oracle_nb = 14;
  std::vector<double> oracle_n_th = {0.1, 0.1, 6.4};
  std::vector<double> oracle_n_0 = {0.1, 0.0, 0.01};
};

struct FigureJob {
  FigureId figure = FigureId::Fig2a;
  model::SystemParams system = model::SystemParams::defaults();
  model::DriveSchedule schedule;
  SweepSpec sweep;
  std::string output;  // not part of the job identity

  // Default job for a figure, including its schedule.
  static FigureJob defaults_for(FigureId id);

  void validate() const;
};

// "section.key=value" pairs applied on top of the file.
using Overrides = std::vector<std::pair<std::string, std::string>>;

// INI text with [system], [schedule], [sweep]. Missing keys take the
// figure's defaults; unknown keys and malformed values raise ConfigError.
FigureJob parse_job(const std::string& ini_text, const Overrides& overrides = {},
                    std::optional<FigureId> figure = std::nullopt);
FigureJob load_job(const std::string& path, const Overrides& overrides = {},
                   std::optional<FigureId> figure = std::nullopt);

// Canonical, complete INI echo; parse_job(serialize_job(j)) reproduces j.
std::string serialize_job(const FigureJob& job);
unsigned long long job_hash(const FigureJob& job);

// Recovers the job from the "# " metadata block of an emitted CSV.
FigureJob job_from_csv_metadata(const std::vector<std::string>& metadata);

std::pair<std::string, std::string> parse_override(const std::string& text);

std::string format_schedule(const model::DriveSchedule& schedule);
model::DriveSchedule parse_schedule(const std::string& text);

}  // namespace herald::exp
