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

#ifndef LEAFKIT_OPTIM_H_
#define LEAFKIT_OPTIM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "leafkit/model.h"

namespace leafkit {

struct ParamRange {
  double lo;
  double hi;
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
};

// Feasible boxes enforced by projection after every optimiser step.
struct ParamRanges {
  ParamRange centre_freq{1e-4, 0.5 - 1e-4};
  ParamRange fwhm{1.0 / 401.0, 0.25};
  ParamRange pool_sigma{0.01, 1.0};
  ParamRange pcen_s{1e-4, 1.0};
  ParamRange pcen_alpha{0.0, 2.0};
  ParamRange pcen_delta{1e-3, 16.0};
  ParamRange pcen_gamma{1e-3, 4.0};

  // The fwhm floor follows the kernel length: one FFT bin of the support.
  static ParamRanges for_kernel(std::size_t kernel_len);
};

struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step_count = 0;
  // One moment vector per parameter group, in visit order.
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

AdamState make_adam(const Model& model, double learning_rate = 1e-4);

// One bias-corrected ADAM update of every group enabled in
// model.frontend.train_mask, followed by projection of those groups.
// Throws TrainingDivergenceError on a non-finite gradient; the model is
// left untouched in that case.
void adam_step(Model& model, const GradientBundle& grads, AdamState& state,
               const ParamRanges& ranges);
void adam_step(Model& model, const GradientBundle& grads, AdamState& state);

// Parameter group view used by the optimiser, the model writer and tests.
struct ParamGroup {
  std::string_view name;
  std::vector<double>* values;
  const std::vector<double>* grads;  // nullptr when no bundle was given
  bool trainable;
  const ParamRange* range;  // nullptr for unconstrained groups
};
std::vector<ParamGroup> param_groups(Model& model, const GradientBundle* grads,
                                     const ParamRanges& ranges);

// Worst relative error between central differences and an analytic
// gradient; the denominator is max(|analytic|, |numeric|, 1e-12).
double finite_diff_check(
    const std::function<double(std::span<const double>)>& loss_fn,
    std::span<const double> params, std::span<const double> analytic,
    double h);

}  // namespace leafkit

#endif  // LEAFKIT_OPTIM_H_
