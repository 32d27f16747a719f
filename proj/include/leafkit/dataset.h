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

#ifndef LEAFKIT_DATASET_H_
#define LEAFKIT_DATASET_H_

#include <cstddef>
#include <string>
#include <vector>

namespace leafkit {

struct Utterance {
  std::string id;
  std::vector<double> samples;
  std::size_t label = 0;
};

struct Dataset {
  double sample_rate = 16000.0;
  std::vector<std::string> label_names;
  std::vector<Utterance> items;

  std::size_t n_classes() const { return label_names.size(); }
  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

}  // namespace leafkit

#endif  // LEAFKIT_DATASET_H_
