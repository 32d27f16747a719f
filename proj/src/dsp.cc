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

#include "leafkit/dsp.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace leafkit {
namespace {

constexpr std::size_t kTimeBlock = 256;
constexpr std::size_t kTapBlock = 64;

void check_kernel_len(std::size_t kernel_len) {
  if (kernel_len == 0 || kernel_len % 2 == 0) {
    throw std::invalid_argument("kernel_len must be odd, got " +
                                std::to_string(kernel_len));
  }
}

// Zero-padded copy with `pad` zeros on both sides.
std::vector<double> pad_signal(std::span<const double> x, std::size_t pad) {
  std::vector<double> xp(x.size() + 2 * pad, 0.0);
  std::copy(x.begin(), x.end(), xp.begin() + static_cast<std::ptrdiff_t>(pad));
  return xp;
}

// y[t] = sum_k xp[t + k] h[k] for two real tap sets sharing one input.
// Blocked over t so the inner loop vectorises without reassociation.
void correlate_pair(const std::vector<double>& xp, const std::vector<double>& h_re,
                    const std::vector<double>& h_im, std::span<double> y_re,
                    std::span<double> y_im) {
  const std::size_t n_out = y_re.size();
  const std::size_t n_taps = h_re.size();
  double acc_re[kTimeBlock];
  double acc_im[kTimeBlock];
  for (std::size_t t0 = 0; t0 < n_out; t0 += kTimeBlock) {
    const std::size_t nb = std::min(kTimeBlock, n_out - t0);
    std::fill_n(acc_re, nb, 0.0);
    std::fill_n(acc_im, nb, 0.0);
    for (std::size_t k = 0; k < n_taps; ++k) {
      const double a = h_re[k];
      const double b = h_im[k];
      const double* x = xp.data() + t0 + k;
      for (std::size_t j = 0; j < nb; ++j) {
        acc_re[j] += a * x[j];
        acc_im[j] += b * x[j];
      }
    }
    std::copy_n(acc_re, nb, y_re.begin() + static_cast<std::ptrdiff_t>(t0));
    std::copy_n(acc_im, nb, y_im.begin() + static_cast<std::ptrdiff_t>(t0));
  }
}

// g[k] = sum_t gy[t] xp[t + k], for two gradient sequences.
void tap_gradients(const std::vector<double>& xp, std::span<const double> gy_re,
                   std::span<const double> gy_im, std::size_t n_taps,
                   std::vector<double>& g_re, std::vector<double>& g_im) {
  const std::size_t n_out = gy_re.size();
  g_re.assign(n_taps, 0.0);
  g_im.assign(n_taps, 0.0);
  double acc_re[kTapBlock];
  double acc_im[kTapBlock];
  for (std::size_t k0 = 0; k0 < n_taps; k0 += kTapBlock) {
    const std::size_t kb = std::min(kTapBlock, n_taps - k0);
    std::fill_n(acc_re, kb, 0.0);
    std::fill_n(acc_im, kb, 0.0);
    for (std::size_t t = 0; t < n_out; ++t) {
      const double gr = gy_re[t];
      const double gi = gy_im[t];
      const double* x = xp.data() + t + k0;
      for (std::size_t j = 0; j < kb; ++j) {
        acc_re[j] += gr * x[j];
        acc_im[j] += gi * x[j];
      }
    }
    std::copy_n(acc_re, kb, g_re.begin() + static_cast<std::ptrdiff_t>(k0));
    std::copy_n(acc_im, kb, g_im.begin() + static_cast<std::ptrdiff_t>(k0));
  }
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

void GaborBankParams::validate() const {
  check_kernel_len(kernel_len);
  if (centre_freq.empty()) {
    throw std::invalid_argument("Gabor bank needs at least one channel");
  }
  if (fwhm.size() != centre_freq.size()) {
    throw std::invalid_argument("Gabor bank: centre_freq/fwhm size mismatch");
  }
  for (std::size_t i = 0; i < centre_freq.size(); ++i) {
    if (!(centre_freq[i] > 0.0 && centre_freq[i] < 0.5)) {
      throw std::invalid_argument("Gabor centre_freq outside (0, 0.5) at channel " +
                                  std::to_string(i));
    }
    if (!(fwhm[i] > 0.0) || !std::isfinite(fwhm[i])) {
      throw std::invalid_argument("Gabor fwhm must be > 0 at channel " +
                                  std::to_string(i));
    }
  }
}

void GaussianPoolParams::validate() const {
  check_kernel_len(kernel_len);
  if (stride < 1) throw std::invalid_argument("pool stride must be >= 1");
  if (sigma.empty()) throw std::invalid_argument("pool needs at least one channel");
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i])) {
      throw std::invalid_argument("pool sigma must be > 0 at channel " +
                                  std::to_string(i));
    }
  }
}

GaborBankParams mel_init_bank(std::size_t n_channels, double sample_rate,
                              std::size_t kernel_len) {
  if (n_channels == 0) throw std::invalid_argument("n_channels must be >= 1");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be > 0");
  check_kernel_len(kernel_len);

  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges_hz(n_channels + 2);
  for (std::size_t k = 0; k < edges_hz.size(); ++k) {
    const double mel = mel_max * static_cast<double>(k) /
                       static_cast<double>(n_channels + 1);
    edges_hz[k] = mel_to_hz(mel);
  }
  edges_hz.front() = 0.0;
  edges_hz.back() = sample_rate / 2.0;

  GaborBankParams bank;
  bank.kernel_len = kernel_len;
  bank.centre_freq.resize(n_channels);
  bank.fwhm.resize(n_channels);
  for (std::size_t i = 0; i < n_channels; ++i) {
    bank.centre_freq[i] = edges_hz[i + 1] / sample_rate;
    bank.fwhm[i] = (edges_hz[i + 2] - edges_hz[i]) / 2.0 / sample_rate;
  }
  return bank;
}

double gabor_sigma_samples(double fwhm) {
  if (!(fwhm > 0.0)) throw std::invalid_argument("fwhm must be > 0");
  return std::sqrt(2.0 * std::numbers::ln2) / (std::numbers::pi * fwhm);
}

std::vector<std::complex<double>> gabor_kernel(double centre_freq, double fwhm,
                                               std::size_t kernel_len) {
  check_kernel_len(kernel_len);
  const double sigma = gabor_sigma_samples(fwhm);
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  const auto half = static_cast<std::ptrdiff_t>(kernel_len / 2);
  std::vector<std::complex<double>> taps(kernel_len);
  for (std::ptrdiff_t t = -half; t <= half; ++t) {
    const double td = static_cast<double>(t);
    const double envelope = norm * std::exp(-td * td / (2.0 * sigma * sigma));
    const double phase = 2.0 * std::numbers::pi * centre_freq * td;
    taps[static_cast<std::size_t>(t + half)] =
        std::polar(envelope, phase);
  }
  return taps;
}

GaborKernelJacobian gabor_kernel_jacobian(double centre_freq, double fwhm,
                                          std::size_t kernel_len) {
  GaborKernelJacobian jac;
  jac.taps = gabor_kernel(centre_freq, fwhm, kernel_len);
  const double sigma = gabor_sigma_samples(fwhm);
  const auto half = static_cast<std::ptrdiff_t>(kernel_len / 2);
  jac.d_centre_freq.resize(kernel_len);
  jac.d_fwhm.resize(kernel_len);
  for (std::ptrdiff_t t = -half; t <= half; ++t) {
    const auto k = static_cast<std::size_t>(t + half);
    const double td = static_cast<double>(t);
    // d/df exp(j 2 pi f t) = j 2 pi t exp(...)
    jac.d_centre_freq[k] =
        std::complex<double>(0.0, 2.0 * std::numbers::pi * td) * jac.taps[k];
    // sigma = kappa / (pi fwhm): d(envelope)/d(fwhm) = envelope (1 - t^2/sigma^2) / fwhm
    jac.d_fwhm[k] = jac.taps[k] * ((1.0 - td * td / (sigma * sigma)) / fwhm);
  }
  return jac;
}

FilterbankResponse filterbank_response(std::span<const double> signal,
                                       const GaborBankParams& bank,
                                       double sample_rate_hz) {
  if (signal.empty()) throw std::invalid_argument("signal must be non-empty");
  bank.validate();
  const std::size_t n = bank.n_channels();
  const std::size_t len = bank.kernel_len;
  const std::size_t half = len / 2;
  FilterbankResponse out{FeatureMap(n, signal.size(), sample_rate_hz, 1),
                         FeatureMap(n, signal.size(), sample_rate_hz, 1)};
  const std::vector<double> xp = pad_signal(signal, half);
  std::vector<double> h_re(len);
  std::vector<double> h_im(len);
  for (std::size_t c = 0; c < n; ++c) {
    const auto taps = gabor_kernel(bank.centre_freq[c], bank.fwhm[c], len);
    for (std::size_t k = 0; k < len; ++k) {
      h_re[k] = taps[len - 1 - k].real();
      h_im[k] = taps[len - 1 - k].imag();
    }
    correlate_pair(xp, h_re, h_im, out.real.channel(c), out.imag.channel(c));
  }
  return out;
}

FeatureMap response_energy(const FilterbankResponse& response) {
  FeatureMap energy(response.real.channels, response.real.frames,
                    response.real.sample_rate_hz, response.real.hop);
  for (std::size_t i = 0; i < energy.data.size(); ++i) {
    const double re = response.real.data[i];
    const double im = response.imag.data[i];
    energy.data[i] = re * re + im * im;
  }
  return energy;
}

FeatureMap filterbank_energy(std::span<const double> signal,
                             const GaborBankParams& bank,
                             double sample_rate_hz) {
  return response_energy(filterbank_response(signal, bank, sample_rate_hz));
}

void filterbank_backward(std::span<const double> signal,
                         const GaborBankParams& bank,
                         const FilterbankResponse& response,
                         const FeatureMap& grad_energy,
                         std::span<double> d_centre_freq,
                         std::span<double> d_fwhm) {
  const std::size_t n = bank.n_channels();
  if (!grad_energy.same_shape(response.real) || grad_energy.channels != n ||
      grad_energy.frames != signal.size()) {
    throw std::invalid_argument("filterbank_backward: shape mismatch");
  }
  if (d_centre_freq.size() != n || d_fwhm.size() != n) {
    throw std::invalid_argument("filterbank_backward: output size mismatch");
  }
  const std::size_t len = bank.kernel_len;
  const std::vector<double> xp = pad_signal(signal, len / 2);
  std::vector<double> gy_re(signal.size());
  std::vector<double> gy_im(signal.size());
  std::vector<double> gh_re;
  std::vector<double> gh_im;
  for (std::size_t c = 0; c < n; ++c) {
    const auto ge = grad_energy.channel(c);
    const auto yr = response.real.channel(c);
    const auto yi = response.imag.channel(c);
    for (std::size_t t = 0; t < signal.size(); ++t) {
      gy_re[t] = 2.0 * yr[t] * ge[t];
      gy_im[t] = 2.0 * yi[t] * ge[t];
    }
    tap_gradients(xp, gy_re, gy_im, len, gh_re, gh_im);
    const auto jac = gabor_kernel_jacobian(bank.centre_freq[c], bank.fwhm[c], len);
    double dc = 0.0;
    double dw = 0.0;
    for (std::size_t m = 0; m < len; ++m) {
      // Tap m of the kernel multiplies xp[t + (len - 1 - m)].
      const double gr = gh_re[len - 1 - m];
      const double gi = gh_im[len - 1 - m];
      dc += gr * jac.d_centre_freq[m].real() + gi * jac.d_centre_freq[m].imag();
      dw += gr * jac.d_fwhm[m].real() + gi * jac.d_fwhm[m].imag();
    }
    d_centre_freq[c] = dc;
    d_fwhm[c] = dw;
  }
}

std::vector<double> pool_kernel(double sigma, std::size_t kernel_len) {
  check_kernel_len(kernel_len);
  if (!(sigma > 0.0)) throw std::invalid_argument("pool sigma must be > 0");
  const std::size_t half = kernel_len / 2;
  if (half == 0) return {1.0};
  const double width = sigma * static_cast<double>(half);
  std::vector<double> w(kernel_len);
  double total = 0.0;
  for (std::size_t k = 0; k < kernel_len; ++k) {
    const double u = (static_cast<double>(k) - static_cast<double>(half)) / width;
    w[k] = std::exp(-0.5 * u * u);
    total += w[k];
  }
  for (auto& v : w) v /= total;
  return w;
}

std::vector<double> pool_kernel_dsigma(double sigma, std::size_t kernel_len) {
  const std::vector<double> w = pool_kernel(sigma, kernel_len);
  const std::size_t half = kernel_len / 2;
  if (half == 0) return {0.0};
  const double width = sigma * static_cast<double>(half);
  // q[k] = d log g[k] / d sigma = (k - c)^2 / (width^2 sigma)
  std::vector<double> q(kernel_len);
  double mean_q = 0.0;
  for (std::size_t k = 0; k < kernel_len; ++k) {
    const double d = static_cast<double>(k) - static_cast<double>(half);
    q[k] = d * d / (width * width * sigma);
    mean_q += w[k] * q[k];
  }
  std::vector<double> dw(kernel_len);
  for (std::size_t k = 0; k < kernel_len; ++k) dw[k] = w[k] * (q[k] - mean_q);
  return dw;
}

FeatureMap gaussian_pool(const FeatureMap& energy,
                         const GaussianPoolParams& pool) {
  pool.validate();
  if (energy.hop != 1) throw std::invalid_argument("gaussian_pool expects stride-1 input");
  if (energy.channels != pool.n_channels()) {
    throw std::invalid_argument("gaussian_pool: channel count mismatch");
  }
  const std::size_t samples = energy.frames;
  const std::size_t frames = pooled_frame_count(samples, pool.stride);
  const auto half = static_cast<std::ptrdiff_t>(pool.kernel_len / 2);
  FeatureMap out(energy.channels, frames, energy.sample_rate_hz, pool.stride);
  for (std::size_t c = 0; c < energy.channels; ++c) {
    const std::vector<double> w = pool_kernel(pool.sigma[c], pool.kernel_len);
    const auto e = energy.channel(c);
    auto o = out.channel(c);
    for (std::size_t n = 0; n < frames; ++n) {
      const auto centre = static_cast<std::ptrdiff_t>(n * pool.stride);
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, centre - half);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(
          static_cast<std::ptrdiff_t>(samples) - 1, centre + half);
      double acc = 0.0;
      for (std::ptrdiff_t t = lo; t <= hi; ++t) {
        acc += w[static_cast<std::size_t>(t - centre + half)] *
               e[static_cast<std::size_t>(t)];
      }
      o[n] = acc;
    }
  }
  return out;
}

PoolGrads gaussian_pool_backward(const FeatureMap& energy,
                                 const GaussianPoolParams& pool,
                                 const FeatureMap& grad_pooled,
                                 bool need_sigma, bool need_energy) {
  pool.validate();
  const std::size_t samples = energy.frames;
  const std::size_t frames = pooled_frame_count(samples, pool.stride);
  if (grad_pooled.channels != energy.channels || grad_pooled.frames != frames ||
      energy.channels != pool.n_channels()) {
    throw std::invalid_argument("gaussian_pool_backward: shape mismatch");
  }
  const auto half = static_cast<std::ptrdiff_t>(pool.kernel_len / 2);
  PoolGrads grads;
  grads.d_sigma.assign(energy.channels, 0.0);
  if (need_energy) {
    grads.d_energy = FeatureMap(energy.channels, samples, energy.sample_rate_hz, 1);
  }
  for (std::size_t c = 0; c < energy.channels; ++c) {
    const std::vector<double> w = pool_kernel(pool.sigma[c], pool.kernel_len);
    const std::vector<double> dw =
        need_sigma ? pool_kernel_dsigma(pool.sigma[c], pool.kernel_len)
                   : std::vector<double>();
    const auto e = energy.channel(c);
    const auto gp = grad_pooled.channel(c);
    double d_sigma = 0.0;
    for (std::size_t n = 0; n < frames; ++n) {
      const double g = gp[n];
      if (g == 0.0) continue;
      const auto centre = static_cast<std::ptrdiff_t>(n * pool.stride);
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, centre - half);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(
          static_cast<std::ptrdiff_t>(samples) - 1, centre + half);
      double acc = 0.0;
      for (std::ptrdiff_t t = lo; t <= hi; ++t) {
        const auto k = static_cast<std::size_t>(t - centre + half);
        if (need_energy) grads.d_energy.at(c, static_cast<std::size_t>(t)) += g * w[k];
        if (need_sigma) acc += dw[k] * e[static_cast<std::size_t>(t)];
      }
      d_sigma += g * acc;
    }
    grads.d_sigma[c] = d_sigma;
  }
  return grads;
}

}  // namespace leafkit
