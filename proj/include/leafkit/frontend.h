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

#ifndef LEAFKIT_FRONTEND_H_
#define LEAFKIT_FRONTEND_H_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "leafkit/dsp.h"
#include "leafkit/feature_map.h"
#include "leafkit/pcen.h"

namespace leafkit {

// Which parameter groups an optimiser step may touch.
struct TrainMask {
  bool filters = true;
  bool pooling = true;
  bool pcen = true;
  bool backend = true;

  bool frontend_frozen_before_pcen() const { return !filters && !pooling; }
  bool operator==(const TrainMask&) const = default;
};

struct FrontendParams {
  double sample_rate_hz = 16000.0;
  GaborBankParams bank;
  GaussianPoolParams pool;
  PcenParams pcen;
  TrainMask train_mask;

  std::size_t n_channels() const { return bank.n_channels(); }
  void validate() const;
};

struct FrontendDefaults {
  std::size_t kernel_len = 401;
  std::size_t hop = 160;
  double pool_sigma = 0.4;
  double pcen_s = 0.04;
  double pcen_alpha = 0.96;
  double pcen_delta = 2.0;
  double pcen_gamma = 2.0;
  double pcen_epsilon = 1e-6;
};

FrontendParams default_frontend(std::size_t n_channels, double sample_rate,
                                const FrontendDefaults& defaults = {});

// Level in dB is 20 log10(rms / reference_amplitude).
struct LoudnessSpec {
  double target_low_db = 15.0;
  double target_high_db = 30.0;
  double reference_amplitude = 2e-5;
};

// Pure gain so that the output level is uniform in [low, high] dB.
// Throws DegenerateInputError for a zero-RMS signal.
std::vector<double> rescale_loudness(std::span<const double> signal,
                                     const LoudnessSpec& spec,
                                     std::mt19937_64& rng);

// Intermediates kept for the backward pass.
struct FrontendTape {
  FilterbankResponse response;  // empty when the filterbank was skipped
  FeatureMap energy;            // stride 1
  FeatureMap pooled;            // strided
  FeatureMap features;          // PCEN output
};

// Filterbank -> energy -> pooling (everything before PCEN).
FeatureMap pooled_energy(std::span<const double> signal,
                         const FrontendParams& params);

FeatureMap extract_features(std::span<const double> signal,
                            const FrontendParams& params);

FrontendTape frontend_forward(std::span<const double> signal,
                              const FrontendParams& params);

struct FrontendGrads {
  std::vector<double> centre_freq;
  std::vector<double> fwhm;
  std::vector<double> pool_sigma;
  std::vector<double> pcen_s;
  std::vector<double> pcen_alpha;
  std::vector<double> pcen_delta;
  std::vector<double> pcen_gamma;

  static FrontendGrads zeros(std::size_t n_channels);
  void add(const FrontendGrads& other);
  void scale(double factor);
};

// Gradient of sum(upstream * features). Groups masked out by
// params.train_mask come back as exact zeros.
FrontendGrads frontend_backward(std::span<const double> signal,
                                const FrontendParams& params,
                                const FrontendTape& tape,
                                const FeatureMap& upstream);
FrontendGrads frontend_backward(std::span<const double> signal,
                                const FrontendParams& params,
                                const FeatureMap& upstream);

// PCEN-only backward when the pooled energies are already known.
FrontendGrads pcen_stage_backward(const FeatureMap& pooled,
                                  const FrontendParams& params,
                                  const FeatureMap& upstream);

}  // namespace leafkit

#endif  // LEAFKIT_FRONTEND_H_
