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
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "leafkit/errors.h"
#include "leafkit/optim.h"

namespace leafkit {
namespace {

Model small_model(std::size_t channels = 4) {
  std::mt19937_64 rng(5);
  Model m;
  m.frontend = default_frontend(channels, 16000.0);
  m.backend = init_backend(channels, 8, 3, rng);
  return m;
}

GradientBundle random_grads(const Model& m, unsigned seed) {
  GradientBundle g = GradientBundle::zeros(m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Model copy = m;
  for (const ParamGroup& group : param_groups(copy, &g, ParamRanges{})) {
    auto* grads = const_cast<std::vector<double>*>(group.grads);
    for (double& v : *grads) v = nd(rng);
  }
  return g;
}

TEST(AdamStep, ZeroGradientLeavesParametersAndCountsStep) {
  Model m = small_model();
  const Model before = m;
  AdamState state = make_adam(m);
  adam_step(m, GradientBundle::zeros(m), state);
  EXPECT_EQ(state.step_count, 1u);
  EXPECT_EQ(m.frontend.bank.centre_freq, before.frontend.bank.centre_freq);
  EXPECT_EQ(m.frontend.pcen.alpha, before.frontend.pcen.alpha);
  EXPECT_EQ(m.backend.w1, before.backend.w1);
}

TEST(AdamStep, FirstStepMovesByLearningRate) {
  Model m = small_model(1);
  AdamState state = make_adam(m, 1e-4);
  GradientBundle g = GradientBundle::zeros(m);
  g.frontend.pcen_alpha[0] = 1.0;
  const double before = m.frontend.pcen.alpha[0];
  adam_step(m, g, state);
  // m_hat = 1, v_hat = 1: step = lr / (1 + eps).
  EXPECT_NEAR(m.frontend.pcen.alpha[0] - before, -1e-4 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(m.frontend.pcen.s[0], 0.04);
}

TEST(AdamStep, ProjectsSmoothingFactorToFloor) {
  Model m = small_model(1);
  m.frontend.pcen.s[0] = 1.00005e-4;
  AdamState state = make_adam(m, 1e-4);
  GradientBundle g = GradientBundle::zeros(m);
  g.frontend.pcen_s[0] = 5.0;
  adam_step(m, g, state);
  EXPECT_EQ(m.frontend.pcen.s[0], 1e-4);
}

TEST(AdamStep, NonFiniteGradientIsDivergence) {
  Model m = small_model();
  const Model before = m;
  AdamState state = make_adam(m);
  GradientBundle g = GradientBundle::zeros(m);
  g.frontend.fwhm[2] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(adam_step(m, g, state), TrainingDivergenceError);
  EXPECT_EQ(m.frontend.bank.fwhm, before.frontend.bank.fwhm);
  EXPECT_EQ(state.step_count, 0u);
}

TEST(AdamStep, DeterministicGivenInputs) {
  Model a = small_model(), b = small_model();
  AdamState sa = make_adam(a), sb = make_adam(b);
  for (unsigned i = 0; i < 5; ++i) {
    const GradientBundle g = random_grads(a, i);
    adam_step(a, g, sa);
    adam_step(b, g, sb);
  }
  EXPECT_EQ(a.frontend.bank.centre_freq, b.frontend.bank.centre_freq);
  EXPECT_EQ(a.backend.w2, b.backend.w2);
  EXPECT_EQ(sa.second_moment, sb.second_moment);
}

TEST(AdamStep, MaskedGroupsInvariantOverManySteps) {
  const TrainMask masks[] = {{false, false, false, true}, {false, false, true, true},
                             {true, true, false, true}, {true, false, true, false}};
  for (const TrainMask& mask : masks) {
    Model m = small_model();
    m.frontend.train_mask = mask;
    const Model before = m;
    AdamState state = make_adam(m);
    for (unsigned i = 0; i < 200; ++i) adam_step(m, random_grads(m, i), state);
    const auto& f0 = before.frontend;
    const auto& f1 = m.frontend;
    EXPECT_EQ(f0.bank.centre_freq == f1.bank.centre_freq, !mask.filters);
    EXPECT_EQ(f0.bank.fwhm == f1.bank.fwhm, !mask.filters);
    EXPECT_EQ(f0.pool.sigma == f1.pool.sigma, !mask.pooling);
    EXPECT_EQ(f0.pcen.s == f1.pcen.s && f0.pcen.alpha == f1.pcen.alpha &&
                  f0.pcen.delta == f1.pcen.delta && f0.pcen.gamma == f1.pcen.gamma,
              !mask.pcen);
    EXPECT_EQ(before.backend.w1 == m.backend.w1, !mask.backend);
  }
}

TEST(ParamRanges, ProjectionKeepsInteriorPoints) {
  const ParamRanges r = ParamRanges::for_kernel(401);
  EXPECT_EQ(r.fwhm.lo, 1.0 / 401.0);
  std::mt19937_64 rng(1);
  for (const ParamRange* range : {&r.centre_freq, &r.fwhm, &r.pool_sigma, &r.pcen_s,
                                  &r.pcen_alpha, &r.pcen_delta, &r.pcen_gamma}) {
    std::uniform_real_distribution<double> u(range->lo, range->hi);
    for (int i = 0; i < 100; ++i) {
      const double v = u(rng);
      EXPECT_EQ(range->clamp(v), v);
    }
    EXPECT_EQ(range->clamp(range->lo - 1.0), range->lo);
    EXPECT_EQ(range->clamp(range->hi + 1.0), range->hi);
  }
}

TEST(ParamGroups, CoverEveryParameterInOrder) {
  Model m = small_model(3);
  const auto groups = param_groups(m, nullptr, ParamRanges{});
  const char* names[] = {"centre_freq", "fwhm",       "pool_sigma", "pcen_s",
                         "pcen_alpha",  "pcen_delta", "pcen_gamma", "backend_w1",
                         "backend_b1",  "backend_w2", "backend_b2"};
  ASSERT_EQ(groups.size(), 11u);
  for (std::size_t i = 0; i < 11; ++i) {
    EXPECT_EQ(groups[i].name, names[i]);
    EXPECT_EQ(groups[i].grads, nullptr);
  }
}

TEST(FiniteDiffCheck, QuadraticIsExact) {
  const std::vector<double> p{1.7};
  const std::vector<double> analytic{2.0 * 3.0 * 1.7 - 1.0};
  const double err = finite_diff_check(
      [](std::span<const double> v) { return 3.0 * v[0] * v[0] - v[0] + 2.0; }, p, analytic,
      1e-3);
  EXPECT_LT(err, 1e-8);
}

TEST(FiniteDiffCheck, ZeroStepRejected) {
  const std::vector<double> p{1.0}, g{0.0};
  EXPECT_THROW(finite_diff_check([](std::span<const double>) { return 0.0; }, p, g, 0.0),
               std::invalid_argument);
}

TEST(FiniteDiffCheck, ReportsWrongGradient) {
  const std::vector<double> p{1.0, 2.0};
  const std::vector<double> wrong{2.0, 5.0};
  const double err = finite_diff_check(
      [](std::span<const double> v) { return v[0] * v[0] + v[1] * v[1]; }, p, wrong, 1e-5);
  EXPECT_NEAR(err, 0.2, 1e-6);
}

}  // namespace
}  // namespace leafkit
