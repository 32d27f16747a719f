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
#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "leafkit/errors.h"
#include "leafkit/frontend.h"
#include "leafkit/optim.h"

namespace leafkit {
namespace {

std::vector<double> random_signal(std::size_t n, unsigned seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

double signal_rms(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double weighted_sum(const FeatureMap& f, const FeatureMap& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.data.size(); ++i) acc += f.data[i] * w.data[i];
  return acc;
}

TEST(DefaultFrontend, InitialValues) {
  const FrontendParams p = default_frontend(40, 16000.0);
  EXPECT_EQ(p.n_channels(), 40u);
  EXPECT_EQ(p.bank.kernel_len, 401u);
  EXPECT_EQ(p.pool.kernel_len, 401u);
  EXPECT_EQ(p.pool.stride, 160u);
  EXPECT_EQ(p.pcen.epsilon, 1e-6);
  for (std::size_t c = 0; c < 40; ++c) {
    EXPECT_EQ(p.pool.sigma[c], 0.4);
    EXPECT_EQ(p.pcen.s[c], 0.04);
    EXPECT_EQ(p.pcen.alpha[c], 0.96);
    EXPECT_EQ(p.pcen.delta[c], 2.0);
    EXPECT_EQ(p.pcen.gamma[c], 2.0);
  }
  EXPECT_TRUE(p.train_mask.filters && p.train_mask.pooling && p.train_mask.pcen);
  EXPECT_NO_THROW(p.validate());
}

TEST(FrontendParams, ChannelMismatchRejected) {
  FrontendParams p = default_frontend(8, 16000.0);
  p.pool.sigma.pop_back();
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(RescaleLoudness, FixedTargetLevel) {
  std::mt19937_64 rng(1);
  const auto x = random_signal(4000, 2, 0.3);
  const auto y = rescale_loudness(x, {20.0, 20.0, 2e-5}, rng);
  EXPECT_NEAR(signal_rms(y), 2e-4, 1e-15);
  const double ratio = y[0] / x[0];
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i] / x[i], ratio, 1e-12 * ratio);
}

TEST(RescaleLoudness, DrawsWithinRange) {
  std::mt19937_64 rng(3);
  const auto x = random_signal(2000, 5, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto y = rescale_loudness(x, {15.0, 30.0, 2e-5}, rng);
    const double db = 20.0 * std::log10(signal_rms(y) / 2e-5);
    EXPECT_GE(db, 15.0 - 1e-9);
    EXPECT_LE(db, 30.0 + 1e-9);
  }
}

TEST(RescaleLoudness, ZeroSignalRejected) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(rescale_loudness(std::vector<double>(10, 0.0), {}, rng), DegenerateInputError);
}

TEST(ExtractFeatures, ShapeOfOneSecond) {
  const FrontendParams p = default_frontend(40, 16000.0);
  const FeatureMap f = extract_features(random_signal(16000, 1, 0.1), p);
  EXPECT_EQ(f.channels, 40u);
  EXPECT_EQ(f.frames, 100u);
  for (double v : f.data) EXPECT_GE(v, 0.0);
}

TEST(ExtractFeatures, ZeroSignalGivesZeroMap) {
  const FeatureMap f = extract_features(std::vector<double>(3200, 0.0), default_frontend(10, 16000.0));
  for (double v : f.data) EXPECT_EQ(v, 0.0);
}

TEST(ExtractFeatures, FrameCountIndependentOfParameters) {
  FrontendParams p = default_frontend(6, 16000.0);
  const auto x = random_signal(1234, 4, 0.1);
  const std::size_t frames = extract_features(x, p).frames;
  p.pool.sigma.assign(6, 0.9);
  p.bank.fwhm.assign(6, 0.2);
  EXPECT_EQ(extract_features(x, p).frames, frames);
  EXPECT_EQ(frames, pooled_frame_count(1234, 160));
}

TEST(ExtractFeatures, CompressionIsNonLinear) {
  // Steady state of a constant energy E: (E/(E+eps)^a + d)^g - d^g.
  const auto steady = [](double e) {
    return std::pow(e / std::pow(e + 1e-6, 0.96) + 2.0, 2.0) - 4.0;
  };
  EXPECT_GT(std::abs(steady(4.0) / steady(1.0) - 4.0), 0.1);

  const FrontendParams p = default_frontend(4, 16000.0);
  std::vector<double> x(8000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.3 * std::sin(0.05 * static_cast<double>(i));
  std::vector<double> x2 = x;
  for (double& v : x2) v *= 2.0;
  const FeatureMap a = extract_features(x, p), b = extract_features(x2, p);
  bool nonlinear = false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    if (a.data[i] > 1e-9 && std::abs(b.data[i] / a.data[i] - 4.0) > 1e-3) nonlinear = true;
  }
  EXPECT_TRUE(nonlinear);
}

TEST(ExtractFeatures, MatchesStageComposition) {
  const FrontendParams p = default_frontend(5, 16000.0);
  const auto x = random_signal(2000, 9, 0.05);
  const FeatureMap direct = pcen_forward(gaussian_pool(filterbank_energy(x, p.bank), p.pool), p.pcen);
  EXPECT_EQ(extract_features(x, p).data, direct.data);
  const FrontendTape tape = frontend_forward(x, p);
  EXPECT_EQ(tape.features.data, direct.data);
}

class FrontendGradientTest : public ::testing::Test {
 protected:
  void SetUp() override {
    params_ = default_frontend(6, 16000.0);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    for (std::size_t c = 0; c < 6; ++c) {
      params_.pool.sigma[c] *= jitter(rng);
      params_.pcen.s[c] *= jitter(rng);
      params_.pcen.alpha[c] *= jitter(rng);
      params_.pcen.delta[c] *= jitter(rng);
      params_.pcen.gamma[c] *= jitter(rng);
    }
    params_.pcen.epsilon = 1e-6;
    signal_ = random_signal(1600, 23, 0.05);
    const std::size_t frames = pooled_frame_count(signal_.size(), 160);
    upstream_ = FeatureMap(6, frames);
    std::normal_distribution<double> nd;
    for (double& v : upstream_.data) v = nd(rng);
  }

  double loss(const FrontendParams& p) const {
    return weighted_sum(extract_features(signal_, p), upstream_);
  }

  FrontendParams params_;
  std::vector<double> signal_;
  FeatureMap upstream_;
};

TEST_F(FrontendGradientTest, EveryGroupMatchesFiniteDifferences) {
  const FrontendGrads g = frontend_backward(signal_, params_, upstream_);
  using Field = std::vector<double>;
  struct Case {
    const char* name;
    Field* (*select)(FrontendParams&);
    const Field* grad;
  };
  const Case cases[] = {
      {"centre_freq", [](FrontendParams& p) { return &p.bank.centre_freq; }, &g.centre_freq},
      {"fwhm", [](FrontendParams& p) { return &p.bank.fwhm; }, &g.fwhm},
      {"pool_sigma", [](FrontendParams& p) { return &p.pool.sigma; }, &g.pool_sigma},
      {"pcen_s", [](FrontendParams& p) { return &p.pcen.s; }, &g.pcen_s},
      {"pcen_alpha", [](FrontendParams& p) { return &p.pcen.alpha; }, &g.pcen_alpha},
      {"pcen_delta", [](FrontendParams& p) { return &p.pcen.delta; }, &g.pcen_delta},
      {"pcen_gamma", [](FrontendParams& p) { return &p.pcen.gamma; }, &g.pcen_gamma},
  };
  for (const Case& c : cases) {
    FrontendParams base = params_;
    const Field start = *c.select(base);
    const double err = finite_diff_check(
        [&](std::span<const double> v) {
          FrontendParams p = params_;
          c.select(p)->assign(v.begin(), v.end());
          return loss(p);
        },
        start, *c.grad, 1e-6);
    EXPECT_LT(err, 5e-3) << c.name;
  }
}

TEST_F(FrontendGradientTest, AllMaskedGivesZeros) {
  params_.train_mask = {false, false, false, true};
  const FrontendGrads g = frontend_backward(signal_, params_, upstream_);
  for (const auto* v : {&g.centre_freq, &g.fwhm, &g.pool_sigma, &g.pcen_s, &g.pcen_alpha,
                        &g.pcen_delta, &g.pcen_gamma}) {
    for (double x : *v) EXPECT_EQ(x, 0.0);
  }
}

TEST_F(FrontendGradientTest, PcenGradientsIndependentOfFilterMask) {
  const FrontendGrads all = frontend_backward(signal_, params_, upstream_);
  params_.train_mask.filters = false;
  params_.train_mask.pooling = false;
  const FrontendGrads pcen_only = frontend_backward(signal_, params_, upstream_);
  EXPECT_EQ(all.pcen_s, pcen_only.pcen_s);
  EXPECT_EQ(all.pcen_alpha, pcen_only.pcen_alpha);
  EXPECT_EQ(all.pcen_delta, pcen_only.pcen_delta);
  EXPECT_EQ(all.pcen_gamma, pcen_only.pcen_gamma);
  for (double v : pcen_only.centre_freq) EXPECT_EQ(v, 0.0);
  for (double v : pcen_only.pool_sigma) EXPECT_EQ(v, 0.0);

  const FrontendGrads staged =
      pcen_stage_backward(pooled_energy(signal_, params_), params_, upstream_);
  EXPECT_EQ(staged.pcen_alpha, all.pcen_alpha);
}

TEST_F(FrontendGradientTest, ShapeMismatchRejected) {
  EXPECT_THROW(frontend_backward(signal_, params_, FeatureMap(6, 3)), std::invalid_argument);
}

}  // namespace
}  // namespace leafkit
