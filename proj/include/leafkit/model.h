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

#ifndef LEAFKIT_MODEL_H_
#define LEAFKIT_MODEL_H_

#include "leafkit/backend.h"
#include "leafkit/frontend.h"

namespace leafkit {

struct Model {
  FrontendParams frontend;
  BackendParams backend;
};

// Per-parameter derivatives aligned one-to-one with Model.
struct GradientBundle {
  FrontendGrads frontend;
  BackendGrads backend;

  static GradientBundle zeros(const Model& model) {
    return {FrontendGrads::zeros(model.frontend.n_channels()),
            BackendGrads::zeros(model.backend)};
  }
  void add(const GradientBundle& other) {
    frontend.add(other.frontend);
    backend.add(other.backend);
  }
  void scale(double factor) {
    frontend.scale(factor);
    backend.scale(factor);
  }
};

}  // namespace leafkit

#endif  // LEAFKIT_MODEL_H_
