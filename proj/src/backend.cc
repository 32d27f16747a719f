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

#include "leafkit/backend.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leafkit {

void BackendParams::validate() const {
  if (input_dim == 0 || hidden == 0 || n_classes < 2) {
    throw std::invalid_argument("backend dimensions must be positive, >= 2 classes");
  }
  if (input_mean.size() != input_dim || input_scale.size() != input_dim ||
      w1.size() != hidden * input_dim || b1.size() != hidden ||
      w2.size() != n_classes * hidden || b2.size() != n_classes) {
    throw std::invalid_argument("backend parameter shapes are inconsistent");
  }
}

BackendGrads BackendGrads::zeros(const BackendParams& p) {
  BackendGrads g;
  g.w1.assign(p.w1.size(), 0.0);
  g.b1.assign(p.b1.size(), 0.0);
  g.w2.assign(p.w2.size(), 0.0);
  g.b2.assign(p.b2.size(), 0.0);
  return g;
}

void BackendGrads::add(const BackendGrads& o) {
  auto acc = [](std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("BackendGrads::add size mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  acc(w1, o.w1);
  acc(b1, o.b1);
  acc(w2, o.w2);
  acc(b2, o.b2);
}

void BackendGrads::scale(double f) {
  for (auto* v : {&w1, &b1, &w2, &b2}) {
    for (auto& x : *v) x *= f;
  }
}

BackendParams init_backend(std::size_t input_dim, std::size_t hidden,
                           std::size_t n_classes, std::mt19937_64& rng) {
  BackendParams p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  p.n_classes = n_classes;
  p.input_mean.assign(input_dim, 0.0);
  p.input_scale.assign(input_dim, 1.0);
  std::normal_distribution<double> n1(0.0, std::sqrt(2.0 / static_cast<double>(input_dim)));
  std::normal_distribution<double> n2(0.0, std::sqrt(1.0 / static_cast<double>(hidden)));
  p.w1.resize(hidden * input_dim);
  for (auto& w : p.w1) w = n1(rng);
  p.b1.assign(hidden, 0.0);
  p.w2.resize(n_classes * hidden);
  for (auto& w : p.w2) w = n2(rng);
  p.b2.assign(n_classes, 0.0);
  p.validate();
  return p;
}

void calibrate_backend_input(BackendParams& params,
                             const std::vector<std::vector<double>>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("calibration needs inputs");
  const std::size_t d = params.input_dim;
  std::vector<double> mean(d, 0.0);
  for (const auto& x : inputs) {
    if (x.size() != d) throw std::invalid_argument("calibration input width mismatch");
    for (std::size_t i = 0; i < d; ++i) mean[i] += x[i];
  }
  const double n = static_cast<double>(inputs.size());
  for (auto& m : mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (const auto& x : inputs) {
    for (std::size_t i = 0; i < d; ++i) {
      const double z = x[i] - mean[i];
      var[i] += z * z;
    }
  }
  params.input_mean = mean;
  for (std::size_t i = 0; i < d; ++i) {
    const double sd = std::sqrt(var[i] / n);
    // A constant feature carries nothing; leave it unscaled.
    params.input_scale[i] = sd > 0.0 ? 1.0 / sd : 1.0;
  }
}

std::vector<double> time_average(const FeatureMap& features) {
  std::vector<double> out(features.channels, 0.0);
  if (features.frames == 0) return out;
  for (std::size_t c = 0; c < features.channels; ++c) {
    double acc = 0.0;
    for (double v : features.channel(c)) acc += v;
    out[c] = acc / static_cast<double>(features.frames);
  }
  return out;
}

namespace {

struct Activations {
  std::vector<double> z;       // standardised input
  std::vector<double> hidden;  // post-ReLU
  std::vector<double> logits;
};

Activations forward(const BackendParams& p, std::span<const double> input) {
  if (input.size() != p.input_dim) {
    throw std::invalid_argument("backend input width mismatch");
  }
  Activations a;
  a.z.resize(p.input_dim);
  for (std::size_t i = 0; i < p.input_dim; ++i) {
    a.z[i] = (input[i] - p.input_mean[i]) * p.input_scale[i];
  }
  a.hidden.resize(p.hidden);
  for (std::size_t h = 0; h < p.hidden; ++h) {
    double acc = p.b1[h];
    const double* row = p.w1.data() + h * p.input_dim;
    for (std::size_t i = 0; i < p.input_dim; ++i) acc += row[i] * a.z[i];
    a.hidden[h] = acc > 0.0 ? acc : 0.0;
  }
  a.logits.resize(p.n_classes);
  for (std::size_t k = 0; k < p.n_classes; ++k) {
    double acc = p.b2[k];
    const double* row = p.w2.data() + k * p.hidden;
    for (std::size_t h = 0; h < p.hidden; ++h) acc += row[h] * a.hidden[h];
    a.logits[k] = acc;
  }
  return a;
}

}  // namespace

std::vector<double> backend_logits(const BackendParams& params,
                                   std::span<const double> input) {
  return forward(params, input).logits;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
}

BackendStepResult backend_backward(const BackendParams& p,
                                   std::span<const double> input,
                                   std::size_t label, BackendGrads* grads) {
  if (label >= p.n_classes) throw std::invalid_argument("label out of range");
  const Activations a = forward(p, input);

  const double top = *std::max_element(a.logits.begin(), a.logits.end());
  std::vector<double> prob(p.n_classes);
  double total = 0.0;
  for (std::size_t k = 0; k < p.n_classes; ++k) {
    prob[k] = std::exp(a.logits[k] - top);
    total += prob[k];
  }
  for (auto& v : prob) v /= total;

  BackendStepResult result;
  result.loss = -(a.logits[label] - top - std::log(total));
  result.predicted = argmax(a.logits);

  std::vector<double> d_logits = prob;
  d_logits[label] -= 1.0;

  std::vector<double> d_hidden(p.hidden, 0.0);
  for (std::size_t k = 0; k < p.n_classes; ++k) {
    const double g = d_logits[k];
    const double* row = p.w2.data() + k * p.hidden;
    for (std::size_t h = 0; h < p.hidden; ++h) d_hidden[h] += g * row[h];
    if (grads) {
      grads->b2[k] += g;
      double* grow = grads->w2.data() + k * p.hidden;
      for (std::size_t h = 0; h < p.hidden; ++h) grow[h] += g * a.hidden[h];
    }
  }
  for (std::size_t h = 0; h < p.hidden; ++h) {
    if (a.hidden[h] <= 0.0) d_hidden[h] = 0.0;
  }

  std::vector<double> d_z(p.input_dim, 0.0);
  for (std::size_t h = 0; h < p.hidden; ++h) {
    const double g = d_hidden[h];
    if (g == 0.0) continue;
    const double* row = p.w1.data() + h * p.input_dim;
    for (std::size_t i = 0; i < p.input_dim; ++i) d_z[i] += g * row[i];
    if (grads) {
      grads->b1[h] += g;
      double* grow = grads->w1.data() + h * p.input_dim;
      for (std::size_t i = 0; i < p.input_dim; ++i) grow[i] += g * a.z[i];
    }
  }
  result.d_input.resize(p.input_dim);
  for (std::size_t i = 0; i < p.input_dim; ++i) {
    result.d_input[i] = d_z[i] * p.input_scale[i];
  }
  return result;
}

}  // namespace leafkit
