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

#ifndef LEAFKIT_CONFIG_H_
#define LEAFKIT_CONFIG_H_

// key=value run configuration. Blank lines and lines starting with '#' are
// ignored; unknown keys and out-of-range values are rejected.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "leafkit/frontend.h"
#include "leafkit/noise.h"
#include "leafkit/trainer.h"

namespace leafkit {

struct RunConfig {
  std::size_t channels = 40;
  double sample_rate = 16000.0;
  FrontendDefaults frontend;  // window, hop, pool_sigma, pcen_*

  double lr = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::uint64_t seed = 1;
  std::size_t hidden_units = 64;
  double segment_s = 1.0;

  bool rescale = true;
  LoudnessSpec loudness;

  std::vector<double> snr_grid{0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<NoiseKind> noise_kinds{NoiseKind::kGaussian, NoiseKind::kBabble};
  std::size_t babble_sources = 3;
  std::size_t babble_pool_size = 12;

  std::size_t adapt_epochs = 200;
  std::size_t adapt_batch_size = 8;
  double adapt_lr = 1e-4;
  bool adapt_backend = false;

  std::size_t toy_classes = 4;
  std::size_t toy_samples_per_class = 50;
  double toy_duration_s = 0.25;
  std::vector<std::uint64_t> protocol_seeds{1, 2, 3};
  Regime protocol_regime = Regime::kPcenOnly;
  double adapt_fraction = 0.2;
  double test_fraction = 0.3;

  std::string manifest;
  std::string noise_manifest;

  void validate() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
// Every key with its current value; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);
std::vector<std::string> config_keys();

FrontendParams make_frontend(const RunConfig& config);
RegimeConfig make_regime_config(const RunConfig& config, Regime regime);
AdaptConfig make_adapt_config(const RunConfig& config);
ProtocolConfig make_protocol_config(const RunConfig& config,
                                    std::uint64_t seed);

}  // namespace leafkit

#endif  // LEAFKIT_CONFIG_H_
