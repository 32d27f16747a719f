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

#include "leafkit/pcen.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace leafkit {
namespace {

void check_energy(const FeatureMap& energy, std::size_t n_channels) {
  if (energy.channels != n_channels) {
    throw std::invalid_argument("PCEN: energy has " +
                                std::to_string(energy.channels) +
                                " channels, params have " +
                                std::to_string(n_channels));
  }
  for (double v : energy.data) {
    if (!(v >= 0.0)) throw std::invalid_argument("PCEN: energy must be >= 0");
  }
}

void check_s(std::span<const double> s) {
  for (double v : s) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw std::invalid_argument("smoothing factor s must lie in (0, 1]");
    }
  }
}

}  // namespace

void PcenParams::validate() const {
  const std::size_t n = s.size();
  if (n == 0) throw std::invalid_argument("PCEN needs at least one channel");
  if (alpha.size() != n || delta.size() != n || gamma.size() != n) {
    throw std::invalid_argument("PCEN per-channel vectors differ in length");
  }
  check_s(s);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(alpha[i] >= 0.0) || !std::isfinite(alpha[i])) {
      throw std::invalid_argument("PCEN alpha must be >= 0");
    }
    if (!(delta[i] >= 0.0) || !std::isfinite(delta[i])) {
      throw std::invalid_argument("PCEN delta must be >= 0");
    }
    if (!(gamma[i] > 0.0) || !std::isfinite(gamma[i])) {
      throw std::invalid_argument("PCEN gamma must be > 0");
    }
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("PCEN epsilon must be > 0");
}

PcenParams PcenParams::uniform(std::size_t n_channels, double s, double alpha,
                               double delta, double gamma, double epsilon) {
  PcenParams p;
  p.s.assign(n_channels, s);
  p.alpha.assign(n_channels, alpha);
  p.delta.assign(n_channels, delta);
  p.gamma.assign(n_channels, gamma);
  p.epsilon = epsilon;
  return p;
}

void SmootherState::push(std::span<const double> frame,
                         std::span<const double> s) {
  if (frame.size() != m_.size() || s.size() != m_.size()) {
    throw std::invalid_argument("SmootherState: width mismatch");
  }
  if (!started_) {
    std::copy(frame.begin(), frame.end(), m_.begin());
    started_ = true;
    return;
  }
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = s[i] * frame[i] + (1.0 - s[i]) * m_[i];
  }
}

FeatureMap iir_smooth(const FeatureMap& energy, std::span<const double> s) {
  check_energy(energy, s.size());
  check_s(s);
  FeatureMap out(energy.channels, energy.frames, energy.sample_rate_hz,
                 energy.hop);
  // Channel-major layout: scan each row rather than going through
  // SmootherState frame by frame. Same recursion.
  for (std::size_t c = 0; c < energy.channels; ++c) {
    const auto e = energy.channel(c);
    auto m = out.channel(c);
    if (e.empty()) continue;
    m[0] = e[0];
    for (std::size_t n = 1; n < e.size(); ++n) {
      m[n] = s[c] * e[n] + (1.0 - s[c]) * m[n - 1];
    }
  }
  return out;
}

FeatureMap pcen_forward(const FeatureMap& energy, const PcenParams& params) {
  params.validate();
  const FeatureMap smooth = iir_smooth(energy, params.s);
  FeatureMap out(energy.channels, energy.frames, energy.sample_rate_hz,
                 energy.hop);
  for (std::size_t c = 0; c < energy.channels; ++c) {
    const double alpha = params.alpha[c];
    const double delta = params.delta[c];
    const double gamma = params.gamma[c];
    const double offset = std::pow(delta, gamma);
    const auto e = energy.channel(c);
    const auto m = smooth.channel(c);
    auto o = out.channel(c);
    for (std::size_t n = 0; n < e.size(); ++n) {
      const double r = e[n] / std::pow(m[n] + params.epsilon, alpha);
      o[n] = std::pow(r + delta, gamma) - offset;
    }
  }
  return out;
}

PcenGrads pcen_backward(const FeatureMap& energy, const PcenParams& params,
                        const FeatureMap& upstream) {
  params.validate();
  if (!energy.same_shape(upstream)) {
    throw std::invalid_argument("pcen_backward: upstream/energy shape mismatch");
  }
  for (double d : params.delta) {
    if (!(d > 0.0)) throw std::invalid_argument("pcen_backward requires delta > 0");
  }
  const FeatureMap smooth = iir_smooth(energy, params.s);
  const std::size_t n_ch = energy.channels;
  const std::size_t n_fr = energy.frames;

  PcenGrads g;
  g.s.assign(n_ch, 0.0);
  g.alpha.assign(n_ch, 0.0);
  g.delta.assign(n_ch, 0.0);
  g.gamma.assign(n_ch, 0.0);
  g.energy = FeatureMap(n_ch, n_fr, energy.sample_rate_hz, energy.hop);

  for (std::size_t c = 0; c < n_ch; ++c) {
    const double s = params.s[c];
    const double alpha = params.alpha[c];
    const double delta = params.delta[c];
    const double gamma = params.gamma[c];
    const double eps = params.epsilon;
    const double log_delta = std::log(delta);
    const double delta_pow = std::pow(delta, gamma);
    const double delta_pow_m1 = std::pow(delta, gamma - 1.0);

    const auto e = energy.channel(c);
    const auto m = smooth.channel(c);
    const auto up = upstream.channel(c);
    auto ge = g.energy.channel(c);

    double d_alpha = 0.0;
    double d_delta = 0.0;
    double d_gamma = 0.0;
    double d_s = 0.0;
    // Gradient reaching M[n] from every later frame through the recursion.
    double carry = 0.0;
    for (std::size_t k = n_fr; k-- > 0;) {
      const double g_out = up[k];
      const double base = m[k] + eps;
      const double scale = std::pow(base, -alpha);
      const double r = e[k] * scale;
      const double rd = r + delta;
      const double rd_pow = std::pow(rd, gamma);
      const double dp_dr = gamma * rd_pow / rd;

      d_delta += g_out * (dp_dr - gamma * delta_pow_m1);
      d_gamma += g_out * (rd_pow * std::log(rd) - delta_pow * log_delta);

      const double g_r = g_out * dp_dr;
      d_alpha += g_r * (-r * std::log(base));
      const double g_m = carry + g_r * (-alpha * r / base);

      if (k == 0) {
        // M[0] = E[0]
        ge[k] = g_r * scale + g_m;
      } else {
        ge[k] = g_r * scale + g_m * s;
        d_s += g_m * (e[k] - m[k - 1]);
      }
      carry = g_m * (1.0 - s);
    }
    g.s[c] = d_s;
    g.alpha[c] = d_alpha;
    g.delta[c] = d_delta;
    g.gamma[c] = d_gamma;
  }
  return g;
}

std::vector<GainPoint> gain_curve(const PcenParams& params, std::size_t channel,
                                  std::span<const double> input_grid) {
  params.validate();
  if (channel >= params.n_channels()) {
    throw std::invalid_argument("gain_curve: channel out of range");
  }
  const double alpha = params.alpha[channel];
  const double delta = params.delta[channel];
  const double gamma = params.gamma[channel];
  const double offset = std::pow(delta, gamma);
  std::vector<GainPoint> curve;
  curve.reserve(input_grid.size());
  for (double e : input_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("gain_curve: grid entries must be > 0");
    const double r = e / std::pow(e + params.epsilon, alpha);
    const double out = std::pow(r + delta, gamma) - offset;
    const double gain = out / e;
    curve.push_back({e, gain, 10.0 * std::log10(gain)});
  }
  return curve;
}

}  // namespace leafkit
