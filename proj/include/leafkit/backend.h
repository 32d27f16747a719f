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

#ifndef LEAFKIT_BACKEND_H_
#define LEAFKIT_BACKEND_H_

// Small classifier standing behind the front-end: time-average the feature
// map, standardise with frozen statistics, one ReLU hidden layer, softmax.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "leafkit/feature_map.h"

namespace leafkit {

struct BackendParams {
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  std::size_t n_classes = 0;
  // Frozen input standardisation: z = (x - input_mean) * input_scale.
  std::vector<double> input_mean;
  std::vector<double> input_scale;
  std::vector<double> w1;  // hidden x input_dim, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // n_classes x hidden, row-major
  std::vector<double> b2;  // n_classes

  void validate() const;
};

struct BackendGrads {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;

  static BackendGrads zeros(const BackendParams& params);
  void add(const BackendGrads& other);
  void scale(double factor);
};

// He-initialised weights, zero biases, identity standardisation.
BackendParams init_backend(std::size_t input_dim, std::size_t hidden,
                           std::size_t n_classes, std::mt19937_64& rng);

// Sets input_mean / input_scale from a set of time-averaged feature vectors.
void calibrate_backend_input(BackendParams& params,
                             const std::vector<std::vector<double>>& inputs);

std::vector<double> time_average(const FeatureMap& features);

std::vector<double> backend_logits(const BackendParams& params,
                                   std::span<const double> input);

struct BackendStepResult {
  double loss = 0.0;
  std::size_t predicted = 0;
  std::vector<double> d_input;
};

// Cross-entropy for one example. Parameter gradients are accumulated into
// grads (may be nullptr when only d_input is needed).
BackendStepResult backend_backward(const BackendParams& params,
                                   std::span<const double> input,
                                   std::size_t label, BackendGrads* grads);

std::size_t argmax(std::span<const double> values);

}  // namespace leafkit

#endif  // LEAFKIT_BACKEND_H_
