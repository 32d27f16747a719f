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

#include "leafkit/noise.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "leafkit/seeding.h"

namespace leafkit {

std::string_view noise_kind_name(NoiseKind kind) {
  return kind == NoiseKind::kGaussian ? "gaussian" : "babble";
}

NoiseKind parse_noise_kind(std::string_view token) {
  if (token == "gaussian") return NoiseKind::kGaussian;
  if (token == "babble") return NoiseKind::kBabble;
  throw std::invalid_argument("unknown noise kind '" + std::string(token) +
                              "' (expected gaussian or babble)");
}

void NoiseSpec::validate() const {
  if (kind == NoiseKind::kBabble && babble_sources < 1) {
    throw std::invalid_argument("babble needs at least one source");
  }
  if (std::isnan(snr_db)) throw std::invalid_argument("snr_db is NaN");
}

double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

double rms(std::span<const double> x) { return std::sqrt(mean_power(x)); }

namespace {

std::vector<double> fit_length(std::span<const double> noise, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = noise[i % noise.size()];
  return out;
}

}  // namespace

double snr_noise_gain(std::span<const double> clean,
                      std::span<const double> noise, double snr_db) {
  const double noise_rms = rms(noise);
  if (noise.empty() || noise_rms == 0.0) {
    throw std::invalid_argument("noise has zero power");
  }
  if (snr_db == std::numeric_limits<double>::infinity()) return 0.0;
  return rms(clean) / noise_rms * std::pow(10.0, -snr_db / 20.0);
}

std::vector<double> mix_at_snr(std::span<const double> clean,
                               std::span<const double> noise, double snr_db) {
  if (noise.empty()) throw std::invalid_argument("noise has zero power");
  const std::vector<double> segment = fit_length(noise, clean.size());
  const double k = snr_noise_gain(clean, segment, snr_db);
  std::vector<double> out(clean.begin(), clean.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += k * segment[i];
  return out;
}

BabbleRecipe babble_recipe(const std::vector<std::vector<double>>& pool,
                           std::size_t n_mix, std::uint64_t seed) {
  if (n_mix < 1) throw std::invalid_argument("babble needs n_mix >= 1");
  if (pool.size() < n_mix) {
    throw std::invalid_argument("babble pool has " + std::to_string(pool.size()) +
                                " items, need " + std::to_string(n_mix));
  }
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: first n_mix entries are a uniform draw.
  for (std::size_t i = 0; i < n_mix; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  BabbleRecipe recipe;
  recipe.sources.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_mix));
  for (std::size_t idx : recipe.sources) {
    const double r = rms(pool[idx]);
    if (r == 0.0) throw std::invalid_argument("babble source has zero power");
    recipe.gains.push_back(1.0 / r);
    recipe.length = std::max(recipe.length, pool[idx].size());
  }
  return recipe;
}

std::vector<double> render_babble(const std::vector<std::vector<double>>& pool,
                                  const BabbleRecipe& recipe) {
  std::vector<double> out(recipe.length, 0.0);
  for (std::size_t j = 0; j < recipe.sources.size(); ++j) {
    const auto& src = pool.at(recipe.sources[j]);
    for (std::size_t t = 0; t < out.size(); ++t) {
      out[t] += recipe.gains[j] * src[t % src.size()];
    }
  }
  return out;
}

std::vector<double> make_babble(const std::vector<std::vector<double>>& pool,
                                std::size_t n_mix, std::uint64_t seed) {
  return render_babble(pool, babble_recipe(pool, n_mix, seed));
}

std::vector<double> gaussian_noise(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(length);
  for (auto& v : out) v = dist(rng);
  return out;
}

std::vector<double> apply_noise(std::span<const double> clean,
                                const NoiseSpec& spec,
                                const std::vector<std::vector<double>>& babble_pool) {
  spec.validate();
  if (spec.snr_db == std::numeric_limits<double>::infinity()) {
    return {clean.begin(), clean.end()};
  }
  const std::vector<double> noise =
      spec.kind == NoiseKind::kGaussian
          ? gaussian_noise(clean.size(), spec.seed)
          : make_babble(babble_pool, spec.babble_sources, spec.seed);
  return mix_at_snr(clean, noise, spec.snr_db);
}

void ToyDatasetSpec::validate() const {
  if (n_classes < 2) throw std::invalid_argument("toy dataset needs >= 2 classes");
  if (samples_per_class < 1) throw std::invalid_argument("toy dataset needs samples");
  if (!(duration_s > 0.0) || !(sample_rate > 0.0)) {
    throw std::invalid_argument("toy duration and sample rate must be > 0");
  }
}

ToyClassTemplate toy_class_template(std::size_t label, std::size_t n_classes,
                                    double sample_rate) {
  const double span = static_cast<double>(std::max<std::size_t>(1, n_classes - 1));
  const double u = static_cast<double>(label) / span;
  // Second resonance walks in a different order than the first so no two
  // classes share both.
  const double v =
      static_cast<double>((label + n_classes / 2) % n_classes) / span;
  const double nyquist_guard = 0.42 * sample_rate;
  ToyClassTemplate t;
  t.f0_hz = 110.0 * std::pow(1.2, static_cast<double>(label));
  t.formant1_hz = std::min(350.0 + 550.0 * u, nyquist_guard);
  t.formant2_hz = std::min(1300.0 + 1500.0 * v, nyquist_guard);
  return t;
}

Dataset gen_toy_dataset(const ToyDatasetSpec& spec) {
  spec.validate();
  Dataset ds;
  ds.sample_rate = spec.sample_rate;
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    ds.label_names.push_back("c" + std::to_string(c));
  }
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate));
  const double sr = spec.sample_rate;
  const double fade = std::min(0.01 * sr, static_cast<double>(n) / 4.0);
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    const ToyClassTemplate base = toy_class_template(c, spec.n_classes, sr);
    for (std::size_t k = 0; k < spec.samples_per_class; ++k) {
      std::mt19937_64 rng(derive_seed(spec.seed, {c, k}));
      std::uniform_real_distribution<double> jitter(-1.0, 1.0);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      const double f0 = base.f0_hz * (1.0 + 0.03 * jitter(rng));
      const double f1 = base.formant1_hz * (1.0 + 0.05 * jitter(rng));
      const double f2 = base.formant2_hz * (1.0 + 0.05 * jitter(rng));
      const double level = 1.0 + 0.2 * jitter(rng);

      std::vector<double> amp;
      std::vector<double> phi;
      for (double h = f0; h < 0.45 * sr; h += f0) {
        const double a1 = std::exp(-0.5 * std::pow((h - f1) / 120.0, 2.0));
        const double a2 = 0.7 * std::exp(-0.5 * std::pow((h - f2) / 180.0, 2.0));
        amp.push_back(a1 + a2 + 0.02);
        phi.push_back(phase(rng));
      }

      Utterance utt;
      utt.id = "toy" + std::to_string(spec.seed) + "_c" + std::to_string(c) +
               "_" + std::to_string(k);
      utt.label = c;
      utt.samples.assign(n, 0.0);
      double peak = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double time = static_cast<double>(t) / sr;
        double acc = 0.0;
        for (std::size_t h = 0; h < amp.size(); ++h) {
          acc += amp[h] * std::sin(2.0 * std::numbers::pi * f0 *
                                       static_cast<double>(h + 1) * time +
                                   phi[h]);
        }
        const double td = static_cast<double>(t);
        const double tail = static_cast<double>(n - 1 - t);
        double env = 1.0;
        if (td < fade) env = 0.5 - 0.5 * std::cos(std::numbers::pi * td / fade);
        if (tail < fade) env = 0.5 - 0.5 * std::cos(std::numbers::pi * tail / fade);
        utt.samples[t] = env * acc;
        peak = std::max(peak, std::abs(utt.samples[t]));
      }
      if (peak > 0.0) {
        for (auto& x : utt.samples) x *= 0.5 * level / peak;
      }
      ds.items.push_back(std::move(utt));
    }
  }
  return ds;
}

}  // namespace leafkit
