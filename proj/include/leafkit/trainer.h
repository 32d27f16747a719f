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

#ifndef LEAFKIT_TRAINER_H_
#define LEAFKIT_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "leafkit/dataset.h"
#include "leafkit/frontend.h"
#include "leafkit/model.h"
#include "leafkit/noise.h"
#include "leafkit/optim.h"

namespace leafkit {

enum class Regime { kUntrained, kPcenOnly, kFiltersOnly, kFull };

std::string_view regime_name(Regime regime);
// Accepts untrained | pcen_only | filters_only | full.
Regime parse_regime(std::string_view token);
TrainMask mask_for(Regime regime);

struct RegimeConfig {
  Regime regime = Regime::kFull;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t hidden_units = 64;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  Model model;
  FrontendParams initial_frontend;
  std::vector<EpochRecord> history;
  std::uint64_t steps = 0;
};

// Called after every optimiser step with the running step count.
using StepObserver = std::function<void(const Model&, std::uint64_t)>;

// Trains a fresh backend (seeded) on top of `frontend`, updating only the
// groups enabled by the regime. Mini-batch gradients are the mean over the
// batch.
TrainResult train(const Dataset& dataset, const FrontendParams& frontend,
                  const RegimeConfig& config,
                  const StepObserver& observer = nullptr);

// Stops after max_steps optimiser steps (epochs are ignored).
TrainResult train_steps(const Dataset& dataset, const FrontendParams& frontend,
                        const RegimeConfig& config, std::uint64_t max_steps);

// Logits averaged over non-overlapping segments of segment_s seconds.
// Recordings shorter than one segment are zero-padded to one segment; a
// trailing partial segment of a longer recording is dropped.
std::vector<double> recording_logits(const Model& model,
                                     const std::vector<double>& samples,
                                     double sample_rate, double segment_s);

double evaluate(const Model& model, const Dataset& dataset, double segment_s);

struct AdaptConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 8;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  bool train_backend = false;
};

struct AdaptResult {
  Model model;
  // PCEN parameters before adaptation and after every epoch.
  std::vector<PcenParams> trajectory;
  std::vector<EpochRecord> history;
  std::uint64_t steps = 0;
};

// Tunes only the PCEN layer (and the backend when asked) of `source` on a
// noisy adaptation set.
AdaptResult adapt_pcen(const Model& source, const Dataset& adapt_set,
                       const AdaptConfig& config);

enum class ProtocolModel { kClean, kNoisy, kBeforeAdaptation, kPcenAdapted };
std::string_view protocol_model_name(ProtocolModel model);

struct ProtocolConfig {
  ToyDatasetSpec toy;
  std::vector<NoiseKind> noise_kinds{NoiseKind::kGaussian, NoiseKind::kBabble};
  std::vector<double> snr_grid{0.0, 5.0, 10.0, 15.0, 20.0};
  LoudnessSpec loudness;
  RegimeConfig training;  // regime/epochs/batch for Clean, Noisy and BA
  AdaptConfig adaptation;
  std::size_t n_channels = 40;
  FrontendDefaults frontend_defaults;
  double segment_s = 0.0;  // 0 selects the toy duration
  // Fractions of each class held out for adaptation and for test.
  double adapt_fraction = 0.2;
  double test_fraction = 0.3;
  std::size_t babble_sources = 3;
  std::size_t babble_pool_size = 12;
};

struct ProtocolRow {
  ProtocolModel model;
  NoiseKind noise_kind;
  double snr_db;
  std::uint64_t seed;
  double accuracy;
};

struct ProtocolSplits {
  Dataset train_core;  // BA training data
  Dataset adapt;       // held out from BA, part of Clean/Noisy training
  Dataset train_full;  // train_core + adapt
  Dataset test;
  std::vector<std::vector<double>> babble_pool;
};

// Generates, loudness-rescales and partitions the toy data for one seed.
ProtocolSplits make_protocol_splits(const ProtocolConfig& config);

// Rows are ordered model-major, then noise kind, then SNR.
std::vector<ProtocolRow> run_noise_protocol(const ProtocolConfig& config);

// Header: model,noise_kind,snr_db,seed,accuracy
std::string protocol_csv(const std::vector<ProtocolRow>& rows);

// Every item mixed with noise of the given kind; SNRs cycle through the
// finite entries of snr_choices using a per-item seeded draw.
Dataset make_noisy(const Dataset& clean, NoiseKind kind,
                   const std::vector<double>& snr_choices,
                   const std::vector<std::vector<double>>& babble_pool,
                   std::uint64_t seed, std::size_t babble_sources = 3);

}  // namespace leafkit

#endif  // LEAFKIT_TRAINER_H_
