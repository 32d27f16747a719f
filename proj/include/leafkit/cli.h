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

#ifndef LEAFKIT_CLI_H_
#define LEAFKIT_CLI_H_

// Command implementations behind the `leafkit` executable. Each throws on
// failure; run_cli maps exceptions to a diagnostic on stderr and exit 1.

#include <string>

#include "leafkit/config.h"
#include "leafkit/feature_map.h"

namespace leafkit {

// One frame per row, header "0,1,...,C-1".
std::string features_csv(const FeatureMap& features);

void cmd_extract(const std::string& wav_path, const std::string& out_csv,
                 const RunConfig& config);

void cmd_train(const std::string& manifest_path, Regime regime,
               const RunConfig& config, const std::string& out_model,
               const std::string& history_csv);

// noise is "kind:snr_db", e.g. "gaussian:0" or "babble:10".
void cmd_adapt(const std::string& model_path, const std::string& manifest_path,
               const std::string& noise, const RunConfig& config,
               const std::string& out_model, const std::string& trajectory_csv);

void cmd_analyze(const std::string& initial_model,
                 const std::string& trained_model, const std::string& out_dir);

void cmd_protocol(const RunConfig& config, const std::string& out_csv);

void cmd_mix(const std::string& in_wav, const std::string& noise,
             const RunConfig& config, const std::string& out_wav);

// Writes toy WAVs plus manifest.csv (train / adapt / test splits).
void cmd_gen_toy(const std::string& out_dir, const RunConfig& config);

int run_cli(int argc, char** argv);

}  // namespace leafkit

#endif  // LEAFKIT_CLI_H_
