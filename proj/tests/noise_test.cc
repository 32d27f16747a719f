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

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "leafkit/noise.h"

namespace leafkit {
namespace {

double power(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

std::vector<double> noise_vec(std::size_t n, unsigned seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

// Sum of harmonic magnitudes of a candidate fundamental (Goertzel-style DFT).
double harmonic_score(const std::vector<double>& x, double sr, double f0) {
  double score = 0.0;
  for (int k = 1; k <= 6; ++k) {
    const std::complex<double> step = std::polar(1.0, -2.0 * std::numbers::pi * f0 * k / sr);
    std::complex<double> phasor = 1.0, acc = 0.0;
    for (double v : x) {
      acc += v * phasor;
      phasor *= step;
    }
    score += std::abs(acc);
  }
  return score;
}

TEST(MixAtSnr, GainExamples) {
  const std::vector<double> clean{1, -1, 1, -1};
  const std::vector<double> noise{-1, -1, 1, 1};
  EXPECT_DOUBLE_EQ(snr_noise_gain(clean, noise, 0.0), 1.0);
  EXPECT_NEAR(snr_noise_gain(clean, noise, 20.0), 0.1, 1e-16);
  const auto out = mix_at_snr(clean, noise, 0.0);
  EXPECT_EQ(out, (std::vector<double>{0, -2, 2, 0}));
}

TEST(MixAtSnr, ZeroNoiseRejected) {
  EXPECT_THROW(mix_at_snr(std::vector<double>{1, 2}, std::vector<double>{0, 0}, 5.0),
               std::invalid_argument);
}

TEST(MixAtSnr, AchievesTargetWithinNanoDecibel) {
  const auto clean = noise_vec(4000, 1, 0.01);
  for (std::size_t noise_len : {4000u, 1500u, 9000u}) {
    const auto noise = noise_vec(noise_len, 2, 3.0);
    for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
      const auto mixed = mix_at_snr(clean, noise, snr);
      ASSERT_EQ(mixed.size(), clean.size());
      std::vector<double> added(clean.size());
      for (std::size_t i = 0; i < clean.size(); ++i) added[i] = mixed[i] - clean[i];
      const double measured = 10.0 * std::log10(power(clean) / power(added));
      EXPECT_NEAR(measured, snr, 1e-9) << noise_len;
    }
  }
}

TEST(ApplyNoise, InfiniteSnrIsPassThrough) {
  const auto clean = noise_vec(100, 3, 1.0);
  NoiseSpec spec;
  spec.snr_db = std::numeric_limits<double>::infinity();
  EXPECT_EQ(apply_noise(clean, spec, {}), clean);
}

TEST(GaussianNoise, DeterministicPerSeed) {
  EXPECT_EQ(gaussian_noise(50, 9), gaussian_noise(50, 9));
  EXPECT_NE(gaussian_noise(50, 9), gaussian_noise(50, 10));
}

class BabbleTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (unsigned i = 0; i < 12; ++i) pool_.push_back(noise_vec(800 + 50 * i, 100 + i, 0.1 + i));
  }
  std::vector<std::vector<double>> pool_;
};

TEST_F(BabbleTest, SingleSourceIsEqualised) {
  const BabbleRecipe r = babble_recipe(pool_, 1, 4);
  const auto b = make_babble(pool_, 1, 4);
  const auto& src = pool_[r.sources[0]];
  ASSERT_EQ(b.size(), src.size());
  for (std::size_t t = 0; t < b.size(); ++t) EXPECT_EQ(b[t], src[t] * r.gains[0]);
  EXPECT_NEAR(std::sqrt(power(b)), 1.0, 1e-12);
}

TEST_F(BabbleTest, DeterministicAndWithinPowerBounds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = make_babble(pool_, 3, seed);
    EXPECT_EQ(a, make_babble(pool_, 3, seed));
    const double r = std::sqrt(power(a));
    EXPECT_GE(r, 1.0);
    EXPECT_LE(r, 3.0);
  }
}

TEST_F(BabbleTest, IsLinearCombinationOfSources) {
  const BabbleRecipe r = babble_recipe(pool_, 3, 77);
  std::vector<double> residual = make_babble(pool_, 3, 77);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto& src = pool_[r.sources[j]];
    for (std::size_t t = 0; t < residual.size(); ++t) {
      residual[t] -= r.gains[j] * src[t % src.size()];
    }
  }
  for (double v : residual) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_NE(r.sources[0], r.sources[1]);
  EXPECT_NE(r.sources[1], r.sources[2]);
  EXPECT_NE(r.sources[0], r.sources[2]);
}

TEST_F(BabbleTest, PoolTooSmallRejected) {
  const std::vector<std::vector<double>> two(pool_.begin(), pool_.begin() + 2);
  EXPECT_THROW(make_babble(two, 3, 1), std::invalid_argument);
}

TEST(ToyDataset, BalancedAndDeterministic) {
  ToyDatasetSpec spec;
  const Dataset a = gen_toy_dataset(spec);
  ASSERT_EQ(a.size(), 200u);
  EXPECT_EQ(a.n_classes(), 4u);
  std::vector<int> counts(4, 0);
  for (const Utterance& u : a.items) {
    ++counts[u.label];
    EXPECT_EQ(u.samples.size(), 4000u);
  }
  for (int c : counts) EXPECT_EQ(c, 50);
  const Dataset b = gen_toy_dataset(spec);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.items[i].samples, b.items[i].samples);
  spec.seed = 2;
  EXPECT_NE(gen_toy_dataset(spec).items[0].samples, a.items[0].samples);
}

TEST(ToyDataset, RejectsSingleClass) {
  ToyDatasetSpec spec;
  spec.n_classes = 1;
  EXPECT_THROW(gen_toy_dataset(spec), std::invalid_argument);
}

TEST(ToyDataset, SpectralPeakOracleSeparatesClasses) {
  ToyDatasetSpec spec;
  spec.samples_per_class = 25;
  const Dataset data = gen_toy_dataset(spec);
  std::vector<double> f0s;
  for (std::size_t c = 0; c < 4; ++c) f0s.push_back(toy_class_template(c, 4, 16000.0).f0_hz);
  std::size_t correct = 0;
  for (const Utterance& u : data.items) {
    double best_f = 0.0, best = -1.0;
    for (double f = 80.0; f <= 300.0; f += 1.0) {
      const double s = harmonic_score(u.samples, 16000.0, f);
      if (s > best) {
        best = s;
        best_f = f;
      }
    }
    std::size_t guess = 0;
    for (std::size_t c = 1; c < 4; ++c) {
      if (std::abs(std::log(best_f / f0s[c])) < std::abs(std::log(best_f / f0s[guess]))) {
        guess = c;
      }
    }
    correct += guess == u.label;
  }
  EXPECT_GT(static_cast<double>(correct) / static_cast<double>(data.size()), 0.95);
}

}  // namespace
}  // namespace leafkit
