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

#include "leafkit/frontend.h"

#include <cmath>
#include <stdexcept>

#include "leafkit/errors.h"

namespace leafkit {

void FrontendParams::validate() const {
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be > 0");
  bank.validate();
  pool.validate();
  pcen.validate();
  const std::size_t n = bank.n_channels();
  if (pool.n_channels() != n || pcen.n_channels() != n) {
    throw std::invalid_argument("front-end channel counts disagree");
  }
}

FrontendParams default_frontend(std::size_t n_channels, double sample_rate,
                                const FrontendDefaults& d) {
  FrontendParams p;
  p.sample_rate_hz = sample_rate;
  p.bank = mel_init_bank(n_channels, sample_rate, d.kernel_len);
  p.pool.sigma.assign(n_channels, d.pool_sigma);
  p.pool.kernel_len = d.kernel_len;
  p.pool.stride = d.hop;
  p.pcen = PcenParams::uniform(n_channels, d.pcen_s, d.pcen_alpha, d.pcen_delta,
                               d.pcen_gamma, d.pcen_epsilon);
  p.train_mask = TrainMask{};
  p.validate();
  return p;
}

std::vector<double> rescale_loudness(std::span<const double> signal,
                                     const LoudnessSpec& spec,
                                     std::mt19937_64& rng) {
  if (spec.target_low_db > spec.target_high_db) {
    throw std::invalid_argument("loudness: target_low_db > target_high_db");
  }
  if (!(spec.reference_amplitude > 0.0)) {
    throw std::invalid_argument("loudness: reference_amplitude must be > 0");
  }
  double power = 0.0;
  for (double x : signal) power += x * x;
  if (signal.empty() || power == 0.0) {
    throw DegenerateInputError("cannot rescale a silent signal");
  }
  const double rms = std::sqrt(power / static_cast<double>(signal.size()));
  std::uniform_real_distribution<double> level(spec.target_low_db,
                                               spec.target_high_db);
  const double target_db = spec.target_low_db == spec.target_high_db
                               ? spec.target_low_db
                               : level(rng);
  const double gain =
      spec.reference_amplitude * std::pow(10.0, target_db / 20.0) / rms;
  std::vector<double> out(signal.begin(), signal.end());
  for (auto& x : out) x *= gain;
  return out;
}

FeatureMap pooled_energy(std::span<const double> signal,
                         const FrontendParams& params) {
  params.validate();
  return gaussian_pool(
      filterbank_energy(signal, params.bank, params.sample_rate_hz),
      params.pool);
}

FeatureMap extract_features(std::span<const double> signal,
                            const FrontendParams& params) {
  return pcen_forward(pooled_energy(signal, params), params.pcen);
}

FrontendTape frontend_forward(std::span<const double> signal,
                              const FrontendParams& params) {
  params.validate();
  FrontendTape tape;
  tape.response = filterbank_response(signal, params.bank, params.sample_rate_hz);
  tape.energy = response_energy(tape.response);
  tape.pooled = gaussian_pool(tape.energy, params.pool);
  tape.features = pcen_forward(tape.pooled, params.pcen);
  return tape;
}

FrontendGrads FrontendGrads::zeros(std::size_t n) {
  FrontendGrads g;
  for (auto* v : {&g.centre_freq, &g.fwhm, &g.pool_sigma, &g.pcen_s,
                  &g.pcen_alpha, &g.pcen_delta, &g.pcen_gamma}) {
    v->assign(n, 0.0);
  }
  return g;
}

void FrontendGrads::add(const FrontendGrads& o) {
  auto acc = [](std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("FrontendGrads::add size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  acc(centre_freq, o.centre_freq);
  acc(fwhm, o.fwhm);
  acc(pool_sigma, o.pool_sigma);
  acc(pcen_s, o.pcen_s);
  acc(pcen_alpha, o.pcen_alpha);
  acc(pcen_delta, o.pcen_delta);
  acc(pcen_gamma, o.pcen_gamma);
}

void FrontendGrads::scale(double f) {
  for (auto* v : {&centre_freq, &fwhm, &pool_sigma, &pcen_s, &pcen_alpha,
                  &pcen_delta, &pcen_gamma}) {
    for (auto& x : *v) x *= f;
  }
}

namespace {

// Copies the PCEN gradients in (masked) and returns d(loss)/d(pooled).
FeatureMap pcen_part(const FeatureMap& pooled, const FrontendParams& params,
                     const FeatureMap& upstream, FrontendGrads& out) {
  PcenGrads pg = pcen_backward(pooled, params.pcen, upstream);
  if (params.train_mask.pcen) {
    out.pcen_s = std::move(pg.s);
    out.pcen_alpha = std::move(pg.alpha);
    out.pcen_delta = std::move(pg.delta);
    out.pcen_gamma = std::move(pg.gamma);
  }
  return std::move(pg.energy);
}

}  // namespace

FrontendGrads pcen_stage_backward(const FeatureMap& pooled,
                                  const FrontendParams& params,
                                  const FeatureMap& upstream) {
  FrontendGrads grads = FrontendGrads::zeros(params.n_channels());
  if (params.train_mask.pcen) pcen_part(pooled, params, upstream, grads);
  return grads;
}

FrontendGrads frontend_backward(std::span<const double> signal,
                                const FrontendParams& params,
                                const FrontendTape& tape,
                                const FeatureMap& upstream) {
  params.validate();
  if (!upstream.same_shape(tape.features)) {
    throw std::invalid_argument("frontend_backward: upstream shape mismatch");
  }
  const TrainMask& mask = params.train_mask;
  FrontendGrads grads = FrontendGrads::zeros(params.n_channels());
  if (!mask.pcen && !mask.pooling && !mask.filters) return grads;

  const FeatureMap d_pooled = pcen_part(tape.pooled, params, upstream, grads);
  if (!mask.pooling && !mask.filters) return grads;

  PoolGrads pg = gaussian_pool_backward(tape.energy, params.pool, d_pooled,
                                        mask.pooling, mask.filters);
  if (mask.pooling) grads.pool_sigma = std::move(pg.d_sigma);
  if (mask.filters) {
    filterbank_backward(signal, params.bank, tape.response, pg.d_energy,
                        grads.centre_freq, grads.fwhm);
  }
  return grads;
}

FrontendGrads frontend_backward(std::span<const double> signal,
                                const FrontendParams& params,
                                const FeatureMap& upstream) {
  return frontend_backward(signal, params, frontend_forward(signal, params),
                           upstream);
}

}  // namespace leafkit
