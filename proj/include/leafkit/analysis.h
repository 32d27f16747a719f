// Copyright 2026 The leafkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LEAFKIT_ANALYSIS_H_
#define LEAFKIT_ANALYSIS_H_

// Before/after parameter forensics and their CSV forms.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leafkit/frontend.h"

namespace leafkit {

struct ChannelDrift {
  std::size_t channel = 0;
  double centre_freq = 0.0;  // cycles/sample
  double centre_freq_hz = 0.0;
  double fwhm = 0.0;
  double fwhm_hz = 0.0;
  double pool_sigma = 0.0;
  double pcen_s = 0.0;
  double pcen_alpha = 0.0;
  double pcen_delta = 0.0;
  double pcen_gamma = 0.0;

  bool operator==(const ChannelDrift&) const = default;
};

// ||trained - initial||_2 / ||initial||_2 per group.
struct GroupNorms {
  double filters = 0.0;  // centre_freq and fwhm together
  double pooling = 0.0;
  double pcen = 0.0;     // s, alpha, delta, gamma together

  bool operator==(const GroupNorms&) const = default;
};

struct DriftReport {
  std::vector<ChannelDrift> channels;  // trained - initial
  GroupNorms norms;

  bool operator==(const DriftReport&) const = default;
};

DriftReport drift_report(const FrontendParams& initial,
                         const FrontendParams& trained);

// Magnitude of the DTFT of each channel's normalised pooling kernel;
// result[c][k] corresponds to freq_grid[k] (cycles/sample, in [0, 0.5]).
std::vector<std::vector<double>> gaussian_response_table(
    const GaussianPoolParams& pool, std::span<const double> freq_grid);

struct GainRow {
  std::size_t channel = 0;
  double input = 0.0;
  double gain = 0.0;
  double gain_db = 0.0;

  bool operator==(const GainRow&) const = default;
};

std::vector<GainRow> gain_curve_table(const PcenParams& pcen,
                                      std::span<const double> grid);

// n points log-spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

// drift.csv:
//   channel,centre_freq,centre_freq_hz,fwhm,fwhm_hz,pool_sigma,
//   pcen_s,pcen_alpha,pcen_delta,pcen_gamma
// followed by one "#norms,filters,pooling,pcen" line carrying GroupNorms.
std::string drift_csv(const DriftReport& report);
DriftReport parse_drift_csv(std::string_view text);

// gaussian_response.csv: model,channel,freq,magnitude
struct ResponseRow {
  std::string model;
  std::size_t channel = 0;
  double freq = 0.0;
  double magnitude = 0.0;

  bool operator==(const ResponseRow&) const = default;
};
std::vector<ResponseRow> response_rows(std::string_view model_tag,
                                       const GaussianPoolParams& pool,
                                       std::span<const double> freq_grid);
std::string response_csv(const std::vector<ResponseRow>& rows);
std::vector<ResponseRow> parse_response_csv(std::string_view text);

// pcen_gains.csv: model,channel,energy,gain,gain_db
struct TaggedGainRow {
  std::string model;
  GainRow row;

  bool operator==(const TaggedGainRow&) const = default;
};
std::vector<TaggedGainRow> tag_gain_rows(std::string_view model_tag,
                                         const std::vector<GainRow>& rows);
std::string gains_csv(const std::vector<TaggedGainRow>& rows);
std::vector<TaggedGainRow> parse_gains_csv(std::string_view text);

}  // namespace leafkit

#endif  // LEAFKIT_ANALYSIS_H_
