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

#ifndef LEAFKIT_PCEN_H_
#define LEAFKIT_PCEN_H_

// Per-channel energy normalisation:
//
//   M[n] = s E[n] + (1 - s) M[n-1],   M[0] = E[0]
//   P[n] = (E[n] / (M[n] + eps)^alpha + delta)^gamma - delta^gamma
//
// Every channel has its own (s, alpha, delta, gamma); eps is shared.

#include <cstddef>
#include <span>
#include <vector>

#include "leafkit/feature_map.h"

namespace leafkit {

struct PcenParams {
  std::vector<double> s;
  std::vector<double> alpha;
  std::vector<double> delta;
  std::vector<double> gamma;
  double epsilon = 1e-6;

  std::size_t n_channels() const { return s.size(); }

  // delta == 0 is accepted so the identity configuration (alpha = 0,
  // delta = 0, gamma = 1) can be evaluated; training keeps delta >= 1e-3.
  void validate() const;

  static PcenParams uniform(std::size_t n_channels, double s, double alpha,
                            double delta, double gamma, double epsilon = 1e-6);
};

// Running smoother value for every channel during a left-to-right scan.
class SmootherState {
 public:
  explicit SmootherState(std::size_t n_channels) : m_(n_channels, 0.0) {}

  // Consumes one frame (one energy value per channel).
  void push(std::span<const double> frame, std::span<const double> s);

  std::span<const double> value() const { return m_; }
  bool started() const { return started_; }

 private:
  std::vector<double> m_;
  bool started_ = false;
};

FeatureMap iir_smooth(const FeatureMap& energy, std::span<const double> s);

FeatureMap pcen_forward(const FeatureMap& energy, const PcenParams& params);

struct PcenGrads {
  std::vector<double> s;
  std::vector<double> alpha;
  std::vector<double> delta;
  std::vector<double> gamma;
  FeatureMap energy;
};

// Reverse-mode derivative of sum(upstream * pcen_forward(energy, params)).
// The s- and energy-gradients include the through-time contribution of the
// smoother recursion. Requires delta > 0.
PcenGrads pcen_backward(const FeatureMap& energy, const PcenParams& params,
                        const FeatureMap& upstream);

struct GainPoint {
  double input;
  double gain;
  double gain_db;
};

// Steady-state (M == E) gain P(E) / E of one channel over an energy grid.
std::vector<GainPoint> gain_curve(const PcenParams& params, std::size_t channel,
                                  std::span<const double> input_grid);

}  // namespace leafkit

#endif  // LEAFKIT_PCEN_H_
