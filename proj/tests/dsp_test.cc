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
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "leafkit/dsp.h"

namespace leafkit {
namespace {

double oracle_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double oracle_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double dtft_magnitude(const std::vector<std::complex<double>>& taps, double f) {
  const long c = static_cast<long>(taps.size() - 1) / 2;
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double t = static_cast<double>(static_cast<long>(i) - c);
    acc += taps[i] * std::polar(1.0, -2.0 * std::numbers::pi * f * t);
  }
  return std::abs(acc);
}

std::vector<double> random_signal(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

TEST(MelBank, FortyChannelsEquallySpacedInMel) {
  const GaborBankParams bank = mel_init_bank(40, 16000.0, 401);
  ASSERT_EQ(bank.n_channels(), 40u);
  const double step = oracle_mel(8000.0) / 41.0;
  for (std::size_t i = 0; i < 40; ++i) {
    const double mel = oracle_mel(bank.centre_freq[i] * 16000.0);
    EXPECT_NEAR(mel, step * static_cast<double>(i + 1), 1e-6);
    if (i > 0) {
      EXPECT_GT(bank.centre_freq[i], bank.centre_freq[i - 1]);
    }
  }
}

TEST(MelBank, SingleChannelAtMelMidpoint) {
  const GaborBankParams bank = mel_init_bank(1, 16000.0, 401);
  EXPECT_NEAR(bank.centre_freq[0] * 16000.0, oracle_hz(oracle_mel(8000.0) / 2.0), 1e-9);
  EXPECT_NEAR(bank.fwhm[0], 0.5 / 2.0, 1e-12);
}

TEST(MelBank, TwoChannelsAtThirds) {
  const GaborBankParams bank = mel_init_bank(2, 16000.0, 401);
  const double top = oracle_mel(8000.0);
  EXPECT_NEAR(bank.centre_freq[0] * 16000.0, oracle_hz(top / 3.0), 1e-9);
  EXPECT_NEAR(bank.centre_freq[1] * 16000.0, oracle_hz(2.0 * top / 3.0), 1e-9);
}

TEST(MelBank, NeighbourSpacingBandwidth) {
  const GaborBankParams bank = mel_init_bank(10, 16000.0, 401);
  const double top = oracle_mel(8000.0);
  for (std::size_t i = 0; i < 10; ++i) {
    const double lo = oracle_hz(top * static_cast<double>(i) / 11.0);
    const double hi = oracle_hz(top * static_cast<double>(i + 2) / 11.0);
    EXPECT_NEAR(bank.fwhm[i], (hi - lo) / 2.0 / 16000.0, 1e-12);
  }
}

TEST(MelBank, RejectsDegenerateArguments) {
  EXPECT_THROW(mel_init_bank(0, 16000.0, 401), std::invalid_argument);
  EXPECT_THROW(mel_init_bank(40, 16000.0, 400), std::invalid_argument);
  EXPECT_THROW(mel_init_bank(40, 0.0, 401), std::invalid_argument);
}

TEST(GaborKernel, CentreTapIsRealPeak) {
  const double fwhm = 0.03;
  const auto taps = gabor_kernel(0.2, fwhm, 401);
  const double sigma = std::sqrt(2.0 * std::log(2.0)) / (std::numbers::pi * fwhm);
  EXPECT_DOUBLE_EQ(gabor_sigma_samples(fwhm), sigma);
  EXPECT_EQ(taps[200].imag(), 0.0);
  EXPECT_NEAR(taps[200].real(), 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma), 1e-15);
}

TEST(GaborKernel, EnvelopeIsEven) {
  const auto taps = gabor_kernel(0.137, 0.011, 401);
  for (std::size_t t = 0; t <= 200; ++t) {
    EXPECT_NEAR(std::abs(taps[200 + t]), std::abs(taps[200 - t]), 1e-18);
  }
}

TEST(GaborKernel, HalfMaximumAtFwhmEdges) {
  for (double fc : {0.05, 0.1, 0.3}) {
    for (double fwhm : {0.01, 0.02, 0.05}) {
      const auto taps = gabor_kernel(fc, fwhm, 401);
      const double peak = dtft_magnitude(taps, fc);
      EXPECT_NEAR(dtft_magnitude(taps, fc - fwhm / 2) / peak, 0.5, 0.01) << fc << " " << fwhm;
      EXPECT_NEAR(dtft_magnitude(taps, fc + fwhm / 2) / peak, 0.5, 0.01) << fc << " " << fwhm;
    }
  }
}

TEST(GaborKernel, RejectsNonPositiveFwhm) {
  EXPECT_THROW(gabor_kernel(0.1, 0.0, 401), std::invalid_argument);
  EXPECT_THROW(gabor_kernel(0.1, -0.01, 401), std::invalid_argument);
}

TEST(GaborKernel, JacobianMatchesFiniteDifferences) {
  const double f = 0.12, w = 0.02, h = 1e-7;
  const GaborKernelJacobian jac = gabor_kernel_jacobian(f, w, 101);
  const auto fp = gabor_kernel(f + h, w, 101), fm = gabor_kernel(f - h, w, 101);
  const auto wp = gabor_kernel(f, w + h, 101), wm = gabor_kernel(f, w - h, 101);
  for (std::size_t i = 0; i < 101; ++i) {
    EXPECT_NEAR(std::abs(jac.d_centre_freq[i] - (fp[i] - fm[i]) / (2 * h)), 0.0,
                1e-5 * (1.0 + std::abs(jac.d_centre_freq[i])));
    EXPECT_NEAR(std::abs(jac.d_fwhm[i] - (wp[i] - wm[i]) / (2 * h)), 0.0,
                1e-5 * (1.0 + std::abs(jac.d_fwhm[i])));
  }
}

TEST(FilterbankEnergy, ZeroSignalGivesZeros) {
  const GaborBankParams bank = mel_init_bank(8, 16000.0, 401);
  const FeatureMap e = filterbank_energy(std::vector<double>(500, 0.0), bank);
  ASSERT_EQ(e.channels, 8u);
  ASSERT_EQ(e.frames, 500u);
  for (double v : e.data) EXPECT_EQ(v, 0.0);
}

TEST(FilterbankEnergy, ImpulseMatchesSquaredEnvelope) {
  const GaborBankParams bank = mel_init_bank(5, 16000.0, 401);
  const std::size_t n = 900, p = 333;
  std::vector<double> x(n, 0.0);
  x[p] = 1.0;
  const FeatureMap e = filterbank_energy(x, bank);
  for (std::size_t c = 0; c < 5; ++c) {
    const double sigma = std::sqrt(2.0 * std::log(2.0)) / (std::numbers::pi * bank.fwhm[c]);
    for (std::size_t t = 0; t < n; ++t) {
      const double tau = static_cast<double>(t) - static_cast<double>(p);
      const double expect = std::abs(tau) > 200.0
                                ? 0.0
                                : std::exp(-tau * tau / (sigma * sigma)) /
                                      (2.0 * std::numbers::pi * sigma * sigma);
      EXPECT_NEAR(e.at(c, t), expect, 1e-15 + 1e-12 * expect);
    }
  }
}

TEST(FilterbankEnergy, QuadraticInScaleAndNonNegative) {
  const GaborBankParams bank = mel_init_bank(6, 16000.0, 401);
  const auto x = random_signal(1200, 3);
  std::vector<double> y(x.size());
  const double c = -2.75;
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i];
  const FeatureMap ex = filterbank_energy(x, bank), ey = filterbank_energy(y, bank);
  for (std::size_t i = 0; i < ex.data.size(); ++i) {
    EXPECT_GE(ex.data[i], 0.0);
    EXPECT_NEAR(ey.data[i], c * c * ex.data[i], 1e-9 * c * c * ex.data[i] + 1e-300);
  }
}

TEST(FilterbankEnergy, RejectsEmptySignal) {
  EXPECT_THROW(filterbank_energy(std::vector<double>{}, mel_init_bank(2, 16000.0, 401)),
               std::invalid_argument);
}

TEST(PoolKernel, SymmetricUnitSumPeakAtCentre) {
  const auto w = pool_kernel(0.4, 401);
  double sum = 0.0;
  for (double v : w) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-14);
  for (std::size_t k = 0; k < 401; ++k) {
    EXPECT_EQ(w[k], w[400 - k]);
    EXPECT_LE(w[k], w[200]);
    EXPECT_GE(w[k], 0.0);
  }
}

TEST(PoolKernel, SigmaDerivativeMatchesFiniteDifferences) {
  const double s = 0.37, h = 1e-7;
  const auto d = pool_kernel_dsigma(s, 401);
  const auto p = pool_kernel(s + h, 401), m = pool_kernel(s - h, 401);
  for (std::size_t k = 0; k < 401; ++k) {
    EXPECT_NEAR(d[k], (p[k] - m[k]) / (2 * h), 1e-7);
  }
}

TEST(GaussianPool, FrameCountAndDcGain) {
  GaussianPoolParams pool{{0.4, 0.2}, 401, 160};
  FeatureMap e(2, 16000);
  for (double& v : e.data) v = 3.5;
  const FeatureMap out = gaussian_pool(e, pool);
  ASSERT_EQ(out.frames, 100u);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t t = 2; t < 98; ++t) EXPECT_NEAR(out.at(c, t), 3.5, 1e-12);
  }
  EXPECT_EQ(pooled_frame_count(16001, 160), 101u);
}

TEST(GaussianPool, ChannelPermutationCommutes) {
  GaussianPoolParams pool{{0.4, 0.1, 0.9}, 401, 160};
  GaussianPoolParams swapped{{0.9, 0.4, 0.1}, 401, 160};
  FeatureMap e(3, 1000), es(3, 1000);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : e.data) v = u(rng);
  for (std::size_t t = 0; t < 1000; ++t) {
    es.at(0, t) = e.at(2, t);
    es.at(1, t) = e.at(0, t);
    es.at(2, t) = e.at(1, t);
  }
  const FeatureMap a = gaussian_pool(e, pool), b = gaussian_pool(es, swapped);
  for (std::size_t t = 0; t < a.frames; ++t) {
    EXPECT_EQ(b.at(0, t), a.at(2, t));
    EXPECT_EQ(b.at(1, t), a.at(0, t));
    EXPECT_EQ(b.at(2, t), a.at(1, t));
    for (std::size_t c = 0; c < 3; ++c) EXPECT_GE(a.at(c, t), 0.0);
  }
}

TEST(GaussianPool, DirectOracle) {
  GaussianPoolParams pool{{0.3}, 21, 4};
  FeatureMap e(1, 37);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (double& v : e.data) v = u(rng);
  const FeatureMap out = gaussian_pool(e, pool);
  ASSERT_EQ(out.frames, 10u);
  const double c = 10.0;
  std::vector<double> g(21);
  double sum = 0.0;
  for (int k = 0; k < 21; ++k) {
    const double z = (k - c) / (0.3 * c);
    g[k] = std::exp(-0.5 * z * z);
    sum += g[k];
  }
  for (std::size_t n = 0; n < out.frames; ++n) {
    double acc = 0.0;
    for (int k = 0; k < 21; ++k) {
      const long idx = static_cast<long>(n * 4) + k - 10;
      if (idx >= 0 && idx < 37) acc += g[k] / sum * e.at(0, idx);
    }
    EXPECT_NEAR(out.at(0, n), acc, 1e-14);
  }
}

TEST(GaussianPool, RejectsNonPositiveSigma) {
  GaussianPoolParams pool{{0.0}, 401, 160};
  EXPECT_THROW(gaussian_pool(FeatureMap(1, 10), pool), std::invalid_argument);
}

}  // namespace
}  // namespace leafkit
