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

#ifndef LEAFKIT_DSP_H_
#define LEAFKIT_DSP_H_

// Parametric Gabor filterbank, squared-modulus energy and strided Gaussian
// low-pass pooling. All frequencies are normalised (cycles/sample) unless a
// name says _hz.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "leafkit/feature_map.h"

namespace leafkit {

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct GaborBankParams {
  std::vector<double> centre_freq;  // (0, 0.5)
  std::vector<double> fwhm;         // > 0, frequency-domain FWHM
  std::size_t kernel_len = 401;     // odd

  std::size_t n_channels() const { return centre_freq.size(); }
  // Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct GaussianPoolParams {
  std::vector<double> sigma;  // (0, 1], relative to the kernel half-width
  std::size_t kernel_len = 401;
  std::size_t stride = 160;

  std::size_t n_channels() const { return sigma.size(); }
  void validate() const;
};

// Centres sit on the interior of n_channels + 2 mel-equispaced points over
// [0, sample_rate / 2]; fwhm_i = (f_{i+1} - f_{i-1}) / 2.
GaborBankParams mel_init_bank(std::size_t n_channels, double sample_rate,
                              std::size_t kernel_len);

// Time-domain standard deviation (samples) of the Gaussian envelope whose
// frequency response has the given FWHM: sqrt(2 ln 2) / (pi * fwhm).
double gabor_sigma_samples(double fwhm);

// Taps for t in [-(L-1)/2, (L-1)/2], centre tap at index (L-1)/2.
std::vector<std::complex<double>> gabor_kernel(double centre_freq, double fwhm,
                                               std::size_t kernel_len);

// Taps together with their partial derivatives w.r.t. centre_freq and fwhm.
struct GaborKernelJacobian {
  std::vector<std::complex<double>> taps;
  std::vector<std::complex<double>> d_centre_freq;
  std::vector<std::complex<double>> d_fwhm;
};
GaborKernelJacobian gabor_kernel_jacobian(double centre_freq, double fwhm,
                                          std::size_t kernel_len);

// Complex filter outputs at stride 1 ("same" zero padding).
struct FilterbankResponse {
  FeatureMap real;
  FeatureMap imag;
};

FilterbankResponse filterbank_response(std::span<const double> signal,
                                       const GaborBankParams& bank,
                                       double sample_rate_hz = 0.0);

FeatureMap response_energy(const FilterbankResponse& response);

// |signal * phi_i|^2 per channel, output length == signal length.
FeatureMap filterbank_energy(std::span<const double> signal,
                             const GaborBankParams& bank,
                             double sample_rate_hz = 0.0);

// Chains d(loss)/d(energy) back to the filter parameters. Results are
// written (not accumulated) into d_centre_freq / d_fwhm.
void filterbank_backward(std::span<const double> signal,
                         const GaborBankParams& bank,
                         const FilterbankResponse& response,
                         const FeatureMap& grad_energy,
                         std::span<double> d_centre_freq,
                         std::span<double> d_fwhm);

// Unit-sum kernel w[t] = g[t] / sum(g), g[t] = exp(-0.5 ((t - c) / (sigma c))^2).
std::vector<double> pool_kernel(double sigma, std::size_t kernel_len);
// d w[t] / d sigma of the normalised kernel.
std::vector<double> pool_kernel_dsigma(double sigma, std::size_t kernel_len);

inline std::size_t pooled_frame_count(std::size_t samples, std::size_t stride) {
  return (samples + stride - 1) / stride;
}

// Output frame n is centred on input sample n * stride.
FeatureMap gaussian_pool(const FeatureMap& energy,
                         const GaussianPoolParams& pool);

struct PoolGrads {
  FeatureMap d_energy;
  std::vector<double> d_sigma;
};
PoolGrads gaussian_pool_backward(const FeatureMap& energy,
                                 const GaussianPoolParams& pool,
                                 const FeatureMap& grad_pooled,
                                 bool need_sigma = true,
                                 bool need_energy = true);

}  // namespace leafkit

#endif  // LEAFKIT_DSP_H_
