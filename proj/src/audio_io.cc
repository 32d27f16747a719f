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

#include "leafkit/audio_io.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>

#include "leafkit/errors.h"
#include "leafkit/text.h"

namespace leafkit {
namespace {

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const std::uint8_t* p, const char* tag) {
  return std::equal(p, p + 4, reinterpret_cast<const std::uint8_t*>(tag));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

WavData decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") ||
      !tag_is(bytes.data() + 8, "WAVE")) {
    throw ParseError("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  WavData wav;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw ParseError("truncated WAV chunk");
    }
    if (tag_is(chunk, "fmt ")) {
      if (size < 16) throw ParseError("fmt chunk too short");
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      wav.sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (tag_is(chunk, "data")) {
      if (!have_fmt) throw ParseError("data chunk before fmt chunk");
      if (format != 1 || bits != 16) {
        throw UnsupportedFormatError("only 16-bit PCM WAV is supported");
      }
      if (channels != 1) throw UnsupportedFormatError("only mono WAV is supported");
      if (size % 2 != 0) throw ParseError("odd-sized 16-bit data chunk");
      wav.samples.resize(size / 2);
      for (std::size_t i = 0; i < wav.samples.size(); ++i) {
        const auto raw = static_cast<std::int16_t>(read_u16(bytes.data() + body + 2 * i));
        wav.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      if (wav.sample_rate == 0) throw ParseError("sample rate is zero");
      return wav;
    }
    pos = body + size + (size & 1u);
  }
  throw ParseError(have_fmt ? "WAV has no data chunk" : "WAV has no fmt chunk");
}

WavData read_wav(const std::string& path) {
  const std::string raw = read_file(path);
  return decode_wav({reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
}

std::vector<std::uint8_t> encode_wav(std::span<const double> samples,
                                     std::uint32_t sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, sample_rate);
  put_u32(out, sample_rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double x : samples) {
    const double scaled = std::nearbyint(x * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

void write_wav(const std::string& path, std::span<const double> samples,
               std::uint32_t sample_rate) {
  const auto bytes = encode_wav(samples, sample_rate);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
    case Split::kAdapt: return "adapt";
  }
  return "train";
}

Split parse_split(std::string_view token) {
  if (token == "train") return Split::kTrain;
  if (token == "valid") return Split::kValid;
  if (token == "test") return Split::kTest;
  if (token == "adapt") return Split::kAdapt;
  throw ParseError("unknown split '" + std::string(token) +
                   "' (expected train, valid, test or adapt)");
}

Manifest parse_manifest(std::string_view text, std::string base_dir,
                        const std::optional<std::vector<std::string>>& declared) {
  Manifest m;
  m.base_dir = std::move(base_dir);
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::set<std::string> paths;
  std::set<std::string> labels;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (!header) {
      if (t != "path,label,split") {
        throw ParseError("manifest header must be 'path,label,split'");
      }
      header = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 3) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": expected 3 fields");
    }
    ManifestRow row{std::string(trim(f[0])), std::string(trim(f[1])),
                    parse_split(trim(f[2]))};
    if (row.path.empty() || row.label.empty()) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": empty field");
    }
    if (!paths.insert(row.path).second) {
      throw ParseError("duplicate manifest path '" + row.path + "'");
    }
    if (declared &&
        std::find(declared->begin(), declared->end(), row.label) == declared->end()) {
      throw ParseError("label '" + row.label + "' is not in the declared label set");
    }
    labels.insert(row.label);
    m.rows.push_back(std::move(row));
  }
  if (!header) throw ParseError("manifest is empty");
  if (declared) {
    m.labels = *declared;
  } else {
    m.labels.assign(labels.begin(), labels.end());
  }
  return m;
}

Manifest load_manifest(const std::string& path,
                       const std::optional<std::vector<std::string>>& declared) {
  const std::string text = read_file(path);
  return parse_manifest(text, std::filesystem::path(path).parent_path().string(),
                        declared);
}

std::string resolve_path(const Manifest& manifest, const ManifestRow& row) {
  const std::filesystem::path p(row.path);
  if (p.is_absolute() || manifest.base_dir.empty()) return p.string();
  return (std::filesystem::path(manifest.base_dir) / p).string();
}

Dataset load_split(const Manifest& manifest, Split split, double expected_rate) {
  Dataset ds;
  ds.sample_rate = expected_rate;
  ds.label_names = manifest.labels;
  for (const auto& row : manifest.rows) {
    if (row.split != split) continue;
    WavData wav = read_wav(resolve_path(manifest, row));
    if (static_cast<double>(wav.sample_rate) != expected_rate) {
      throw UnsupportedFormatError("'" + row.path + "' is sampled at " +
                                   std::to_string(wav.sample_rate) + " Hz, expected " +
                                   format_double(expected_rate));
    }
    const auto it = std::find(manifest.labels.begin(), manifest.labels.end(), row.label);
    ds.items.push_back({row.path, std::move(wav.samples),
                        static_cast<std::size_t>(it - manifest.labels.begin())});
  }
  return ds;
}

}  // namespace leafkit
