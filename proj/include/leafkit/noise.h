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

#ifndef LEAFKIT_NOISE_H_
#define LEAFKIT_NOISE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leafkit/dataset.h"

namespace leafkit {

enum class NoiseKind { kGaussian, kBabble };

std::string_view noise_kind_name(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view token);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kGaussian;
  double snr_db = 0.0;  // +inf means "no noise"
  std::uint64_t seed = 0;
  std::size_t babble_sources = 3;

  void validate() const;
};

double rms(std::span<const double> x);
double mean_power(std::span<const double> x);

// Scale applied to the noise: (rms_clean / rms_noise) * 10^(-snr_db / 20).
double snr_noise_gain(std::span<const double> clean,
                      std::span<const double> noise, double snr_db);

// clean + k * noise over the length of clean. A shorter noise is tiled; the
// SNR is measured on exactly the noise samples that get added.
std::vector<double> mix_at_snr(std::span<const double> clean,
                               std::span<const double> noise, double snr_db);

// Which pool items make up a babble mixture and their equalising gains.
struct BabbleRecipe {
  std::vector<std::size_t> sources;
  std::vector<double> gains;  // 1 / rms(source)
  std::size_t length = 0;     // longest chosen source; shorter ones are tiled
};

BabbleRecipe babble_recipe(const std::vector<std::vector<double>>& pool,
                           std::size_t n_mix, std::uint64_t seed);
std::vector<double> render_babble(const std::vector<std::vector<double>>& pool,
                                  const BabbleRecipe& recipe);
std::vector<double> make_babble(const std::vector<std::vector<double>>& pool,
                                std::size_t n_mix, std::uint64_t seed);

std::vector<double> gaussian_noise(std::size_t length, std::uint64_t seed);

// Adds noise described by spec to clean. babble_pool is only read for
// NoiseKind::kBabble.
std::vector<double> apply_noise(std::span<const double> clean,
                                const NoiseSpec& spec,
                                const std::vector<std::vector<double>>& babble_pool);

struct ToyDatasetSpec {
  std::size_t n_classes = 4;
  std::size_t samples_per_class = 50;
  double duration_s = 0.25;
  double sample_rate = 16000.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// Class-level acoustic template: harmonic complex shaped by two resonances.
struct ToyClassTemplate {
  double f0_hz;
  double formant1_hz;
  double formant2_hz;
};
ToyClassTemplate toy_class_template(std::size_t label, std::size_t n_classes,
                                    double sample_rate);

// Items are ordered class-major; ids are "toy<seed>_c<label>_<k>".
Dataset gen_toy_dataset(const ToyDatasetSpec& spec);

}  // namespace leafkit

#endif  // LEAFKIT_NOISE_H_
