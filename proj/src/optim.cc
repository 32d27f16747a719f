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

#include "leafkit/optim.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "leafkit/errors.h"

namespace leafkit {

ParamRanges ParamRanges::for_kernel(std::size_t kernel_len) {
  ParamRanges r;
  r.fwhm.lo = 1.0 / static_cast<double>(kernel_len);
  return r;
}

std::vector<ParamGroup> param_groups(Model& model, const GradientBundle* grads,
                                     const ParamRanges& ranges) {
  FrontendParams& fe = model.frontend;
  BackendParams& be = model.backend;
  const TrainMask& mask = fe.train_mask;
  auto gf = [&](std::vector<double> FrontendGrads::*member)
      -> const std::vector<double>* {
    return grads ? &(grads->frontend.*member) : nullptr;
  };
  auto gb = [&](std::vector<double> BackendGrads::*member)
      -> const std::vector<double>* {
    return grads ? &(grads->backend.*member) : nullptr;
  };
  return {
      {"centre_freq", &fe.bank.centre_freq, gf(&FrontendGrads::centre_freq),
       mask.filters, &ranges.centre_freq},
      {"fwhm", &fe.bank.fwhm, gf(&FrontendGrads::fwhm), mask.filters,
       &ranges.fwhm},
      {"pool_sigma", &fe.pool.sigma, gf(&FrontendGrads::pool_sigma),
       mask.pooling, &ranges.pool_sigma},
      {"pcen_s", &fe.pcen.s, gf(&FrontendGrads::pcen_s), mask.pcen,
       &ranges.pcen_s},
      {"pcen_alpha", &fe.pcen.alpha, gf(&FrontendGrads::pcen_alpha), mask.pcen,
       &ranges.pcen_alpha},
      {"pcen_delta", &fe.pcen.delta, gf(&FrontendGrads::pcen_delta), mask.pcen,
       &ranges.pcen_delta},
      {"pcen_gamma", &fe.pcen.gamma, gf(&FrontendGrads::pcen_gamma), mask.pcen,
       &ranges.pcen_gamma},
      {"backend_w1", &be.w1, gb(&BackendGrads::w1), mask.backend, nullptr},
      {"backend_b1", &be.b1, gb(&BackendGrads::b1), mask.backend, nullptr},
      {"backend_w2", &be.w2, gb(&BackendGrads::w2), mask.backend, nullptr},
      {"backend_b2", &be.b2, gb(&BackendGrads::b2), mask.backend, nullptr},
  };
}

AdamState make_adam(const Model& model, double learning_rate) {
  AdamState state;
  state.learning_rate = learning_rate;
  Model shape = model;
  for (const ParamGroup& group : param_groups(shape, nullptr, ParamRanges{})) {
    state.first_moment.emplace_back(group.values->size(), 0.0);
    state.second_moment.emplace_back(group.values->size(), 0.0);
  }
  return state;
}

void adam_step(Model& model, const GradientBundle& grads, AdamState& state) {
  adam_step(model, grads, state,
            ParamRanges::for_kernel(model.frontend.bank.kernel_len));
}

void adam_step(Model& model, const GradientBundle& grads, AdamState& state,
               const ParamRanges& ranges) {
  std::vector<ParamGroup> groups = param_groups(model, &grads, ranges);
  if (state.first_moment.size() != groups.size() ||
      state.second_moment.size() != groups.size()) {
    throw std::invalid_argument("AdamState does not match the model layout");
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const ParamGroup& group = groups[gi];
    if (group.grads->size() != group.values->size() ||
        state.first_moment[gi].size() != group.values->size()) {
      throw std::invalid_argument(std::string("gradient shape mismatch in ") +
                                  std::string(group.name));
    }
    if (!group.trainable) continue;
    for (double v : *group.grads) {
      if (!std::isfinite(v)) {
        throw TrainingDivergenceError(std::string("non-finite gradient in ") +
                                      std::string(group.name));
      }
    }
  }

  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bias1 = 1.0 - std::pow(state.beta1, t);
  const double bias2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const ParamGroup& group = groups[gi];
    if (!group.trainable) continue;
    std::vector<double>& values = *group.values;
    const std::vector<double>& g = *group.grads;
    std::vector<double>& m = state.first_moment[gi];
    std::vector<double>& v = state.second_moment[gi];
    for (std::size_t i = 0; i < values.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      values[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
      if (group.range) values[i] = group.range->clamp(values[i]);
    }
  }
}

double finite_diff_check(
    const std::function<double(std::span<const double>)>& loss_fn,
    std::span<const double> params, std::span<const double> analytic,
    double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_check: h must be > 0");
  if (params.size() != analytic.size()) {
    throw std::invalid_argument("finite_diff_check: size mismatch");
  }
  std::vector<double> probe(params.begin(), params.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double up = loss_fn(probe);
    probe[i] = orig - h;
    const double down = loss_fn(probe);
    probe[i] = orig;
    const double numeric = (up - down) / (2.0 * h);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-12});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace leafkit
