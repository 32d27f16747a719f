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

#ifndef LEAFKIT_FEATURE_MAP_H_
#define LEAFKIT_FEATURE_MAP_H_

#include <cstddef>
#include <span>
#include <vector>

namespace leafkit {

// Channel x frame matrix, row-major (one contiguous row per channel).
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t frames = 0;
  double sample_rate_hz = 0.0;
  std::size_t hop = 1;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(std::size_t n_channels, std::size_t n_frames,
             double rate_hz = 0.0, std::size_t hop_samples = 1)
      : channels(n_channels),
        frames(n_frames),
        sample_rate_hz(rate_hz),
        hop(hop_samples),
        data(n_channels * n_frames, 0.0) {}

  double& at(std::size_t c, std::size_t t) { return data[c * frames + t]; }
  double at(std::size_t c, std::size_t t) const { return data[c * frames + t]; }

  std::span<double> channel(std::size_t c) {
    return {data.data() + c * frames, frames};
  }
  std::span<const double> channel(std::size_t c) const {
    return {data.data() + c * frames, frames};
  }

  bool same_shape(const FeatureMap& other) const {
    return channels == other.channels && frames == other.frames;
  }
};

}  // namespace leafkit

#endif  // LEAFKIT_FEATURE_MAP_H_
