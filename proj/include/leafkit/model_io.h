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

#ifndef LEAFKIT_MODEL_IO_H_
#define LEAFKIT_MODEL_IO_H_

// Flat text model file. Sections appear in the order gabor, pool, pcen,
// backend, meta; each holds key=value lines, arrays comma-separated with 17
// significant digits:
//
//   [gabor]
//   kernel_len=401
//   centre_freq=...
//   fwhm=...
//   [pool]
//   kernel_len=401
//   stride=160
//   sigma=...
//   [pcen]
//   epsilon=...
//   s=... alpha=... delta=... gamma=...
//   [backend]
//   input_dim=, hidden=, n_classes=, labels=, input_mean=, input_scale=,
//   w1=, b1=, w2=, b2=
//   [meta]
//   format=leafkit-model-1, sample_rate=, train_mask=, then free-form keys

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "leafkit/model.h"

namespace leafkit {

struct ModelFile {
  Model model;
  std::vector<std::string> labels;
  std::map<std::string, std::string> meta;  // free-form, written sorted
};

std::string format_model(const ModelFile& file);
ModelFile parse_model(std::string_view text);

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

// Text of a single section ("gabor", "pool", ...) including its header.
std::string model_section(std::string_view model_text, std::string_view name);

}  // namespace leafkit

#endif  // LEAFKIT_MODEL_IO_H_
