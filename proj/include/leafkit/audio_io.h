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

#ifndef LEAFKIT_AUDIO_IO_H_
#define LEAFKIT_AUDIO_IO_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leafkit/dataset.h"

namespace leafkit {

struct WavData {
  std::vector<double> samples;  // [-1, 1)
  std::uint32_t sample_rate = 0;
};

// RIFF/WAVE, PCM 16-bit mono only. Samples are int16 / 32768.
// Throws UnsupportedFormatError or ParseError.
WavData read_wav(const std::string& path);
WavData decode_wav(std::span<const std::uint8_t> bytes);

// Inverse of read_wav for values representable as k / 32768; anything else
// is rounded to the nearest step and clipped.
void write_wav(const std::string& path, std::span<const double> samples,
               std::uint32_t sample_rate);
std::vector<std::uint8_t> encode_wav(std::span<const double> samples,
                                     std::uint32_t sample_rate);

enum class Split { kTrain, kValid, kTest, kAdapt };
std::string_view split_name(Split split);
Split parse_split(std::string_view token);

struct ManifestRow {
  std::string path;
  std::string label;
  Split split;
};

struct Manifest {
  std::vector<ManifestRow> rows;
  std::vector<std::string> labels;  // sorted, unique
  std::string base_dir;             // relative paths resolve against this
};

// CSV with header "path,label,split". When declared_labels is given every
// row label must be in it and it becomes the label set.
Manifest load_manifest(const std::string& path,
                       const std::optional<std::vector<std::string>>&
                           declared_labels = std::nullopt);
Manifest parse_manifest(std::string_view text, std::string base_dir = {},
                        const std::optional<std::vector<std::string>>&
                            declared_labels = std::nullopt);

std::string resolve_path(const Manifest& manifest, const ManifestRow& row);

// Reads every row of one split. A sample rate different from expected_rate
// is an UnsupportedFormatError.
Dataset load_split(const Manifest& manifest, Split split, double expected_rate);

}  // namespace leafkit

#endif  // LEAFKIT_AUDIO_IO_H_
