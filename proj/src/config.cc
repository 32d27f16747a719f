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

#include "leafkit/config.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>

#include "leafkit/errors.h"
#include "leafkit/text.h"

namespace leafkit {
namespace {

struct Key {
  const char* name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

std::size_t to_size(std::string_view v) {
  const long long x = parse_int(v);
  if (x < 0) throw ParseError("expected a non-negative integer, got '" + std::string(v) + "'");
  return static_cast<std::size_t>(x);
}

std::uint64_t to_u64(std::string_view v) { return static_cast<std::uint64_t>(to_size(v)); }

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("expected true or false, got '" + std::string(v) + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

#define LK_SIZE(key, field)                                                     \
  Key{key, [](const RunConfig& c) { return std::to_string(c.field); },          \
      [](RunConfig& c, std::string_view v) { c.field = to_size(v); }}
#define LK_DOUBLE(key, field)                                                   \
  Key{key, [](const RunConfig& c) { return format_double(c.field); },           \
      [](RunConfig& c, std::string_view v) { c.field = parse_double(v); }}
#define LK_BOOL(key, field)                                                     \
  Key{key, [](const RunConfig& c) { return from_bool(c.field); },               \
      [](RunConfig& c, std::string_view v) { c.field = to_bool(v); }}
#define LK_STRING(key, field)                                                   \
  Key{key, [](const RunConfig& c) { return c.field; },                          \
      [](RunConfig& c, std::string_view v) { c.field = std::string(v); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      LK_SIZE("channels", channels),
      LK_DOUBLE("sample_rate", sample_rate),
      LK_SIZE("window", frontend.kernel_len),
      LK_SIZE("hop", frontend.hop),
      LK_DOUBLE("pool_sigma", frontend.pool_sigma),
      LK_DOUBLE("pcen_s", frontend.pcen_s),
      LK_DOUBLE("pcen_alpha", frontend.pcen_alpha),
      LK_DOUBLE("pcen_delta", frontend.pcen_delta),
      LK_DOUBLE("pcen_gamma", frontend.pcen_gamma),
      LK_DOUBLE("pcen_epsilon", frontend.pcen_epsilon),
      LK_DOUBLE("lr", lr),
      LK_DOUBLE("adam_beta1", adam_beta1),
      LK_DOUBLE("adam_beta2", adam_beta2),
      LK_DOUBLE("adam_eps", adam_eps),
      LK_SIZE("batch_size", batch_size),
      LK_SIZE("epochs", epochs),
      Key{"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
          [](RunConfig& c, std::string_view v) { c.seed = to_u64(v); }},
      LK_SIZE("hidden_units", hidden_units),
      LK_DOUBLE("segment_s", segment_s),
      LK_BOOL("rescale", rescale),
      LK_DOUBLE("loudness_low_db", loudness.target_low_db),
      LK_DOUBLE("loudness_high_db", loudness.target_high_db),
      LK_DOUBLE("loudness_reference", loudness.reference_amplitude),
      Key{"snr_grid", [](const RunConfig& c) { return join_doubles(c.snr_grid); },
          [](RunConfig& c, std::string_view v) { c.snr_grid = parse_doubles(v); }},
      Key{"noise_kinds",
          [](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.noise_kinds.size(); ++i) {
              if (i) out += ',';
              out += noise_kind_name(c.noise_kinds[i]);
            }
            return out;
          },
          [](RunConfig& c, std::string_view v) {
            c.noise_kinds.clear();
            for (const auto& t : split(v, ',')) c.noise_kinds.push_back(parse_noise_kind(trim(t)));
          }},
      LK_SIZE("babble_sources", babble_sources),
      LK_SIZE("babble_pool_size", babble_pool_size),
      LK_SIZE("adapt_epochs", adapt_epochs),
      LK_SIZE("adapt_batch_size", adapt_batch_size),
      LK_DOUBLE("adapt_lr", adapt_lr),
      LK_BOOL("adapt_backend", adapt_backend),
      LK_SIZE("toy_classes", toy_classes),
      LK_SIZE("toy_samples_per_class", toy_samples_per_class),
      LK_DOUBLE("toy_duration_s", toy_duration_s),
      Key{"protocol_seeds",
          [](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.protocol_seeds.size(); ++i) {
              if (i) out += ',';
              out += std::to_string(c.protocol_seeds[i]);
            }
            return out;
          },
          [](RunConfig& c, std::string_view v) {
            c.protocol_seeds.clear();
            for (const auto& t : split(v, ',')) c.protocol_seeds.push_back(to_u64(trim(t)));
          }},
      Key{"protocol_regime",
          [](const RunConfig& c) { return std::string(regime_name(c.protocol_regime)); },
          [](RunConfig& c, std::string_view v) { c.protocol_regime = parse_regime(v); }},
      LK_DOUBLE("adapt_fraction", adapt_fraction),
      LK_DOUBLE("test_fraction", test_fraction),
      LK_STRING("manifest", manifest),
      LK_STRING("noise_manifest", noise_manifest),
  };
  return table;
}

#undef LK_SIZE
#undef LK_DOUBLE
#undef LK_BOOL
#undef LK_STRING

void require(bool ok, const std::string& what) {
  if (!ok) throw DegenerateInputError("config: " + what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void RunConfig::validate() const {
  require(channels > 0, "channels must be positive");
  require(finite(sample_rate) && sample_rate > 0, "sample_rate must be positive");
  make_frontend(*this).validate();
  require(finite(lr) && lr > 0, "lr must be positive");
  require(adam_beta1 >= 0 && adam_beta1 < 1, "adam_beta1 must lie in [0, 1)");
  require(adam_beta2 >= 0 && adam_beta2 < 1, "adam_beta2 must lie in [0, 1)");
  require(finite(adam_eps) && adam_eps > 0, "adam_eps must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(hidden_units > 0, "hidden_units must be positive");
  require(finite(segment_s) && segment_s > 0, "segment_s must be positive");
  require(finite(loudness.target_low_db) && finite(loudness.target_high_db) &&
              loudness.target_low_db <= loudness.target_high_db,
          "loudness range must be finite with low <= high");
  require(finite(loudness.reference_amplitude) && loudness.reference_amplitude > 0,
          "loudness_reference must be positive");
  require(!snr_grid.empty(), "snr_grid must not be empty");
  for (double s : snr_grid) require(!std::isnan(s), "snr_grid entries must be numbers");
  require(!noise_kinds.empty(), "noise_kinds must not be empty");
  require(babble_sources > 0, "babble_sources must be positive");
  require(babble_pool_size >= babble_sources, "babble_pool_size must be >= babble_sources");
  require(adapt_batch_size > 0, "adapt_batch_size must be positive");
  require(finite(adapt_lr) && adapt_lr > 0, "adapt_lr must be positive");
  require(toy_classes >= 2, "toy_classes must be at least 2");
  require(toy_samples_per_class > 0, "toy_samples_per_class must be positive");
  require(finite(toy_duration_s) && toy_duration_s > 0, "toy_duration_s must be positive");
  require(!protocol_seeds.empty(), "protocol_seeds must not be empty");
  require(adapt_fraction > 0 && test_fraction > 0 && adapt_fraction + test_fraction < 1,
          "adapt_fraction and test_fraction must be positive with sum < 1");
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string_view, const Key*> index;
  for (const Key& k : keys()) index[k.name] = &k;
  RunConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = trim(t.substr(0, eq));
    const std::string_view value = trim(t.substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) {
      throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" +
                       std::string(key) + "'");
    }
    try {
      it->second->set(config, value);
    } catch (const std::exception& e) {
      throw ParseError("config line " + std::to_string(line_no) + " (" + std::string(key) +
                       "): " + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_config(text);
}

std::string format_config(const RunConfig& config) {
  std::string out;
  for (const Key& k : keys()) {
    out += k.name;
    out += '=';
    out += k.get(config);
    out += '\n';
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Key& k : keys()) out.emplace_back(k.name);
  return out;
}

FrontendParams make_frontend(const RunConfig& config) {
  return default_frontend(config.channels, config.sample_rate, config.frontend);
}

RegimeConfig make_regime_config(const RunConfig& config, Regime regime) {
  RegimeConfig rc;
  rc.regime = regime;
  rc.epochs = config.epochs;
  rc.batch_size = config.batch_size;
  rc.seed = config.seed;
  rc.learning_rate = config.lr;
  rc.beta1 = config.adam_beta1;
  rc.beta2 = config.adam_beta2;
  rc.adam_eps = config.adam_eps;
  rc.hidden_units = config.hidden_units;
  return rc;
}

AdaptConfig make_adapt_config(const RunConfig& config) {
  AdaptConfig ac;
  ac.epochs = config.adapt_epochs;
  ac.batch_size = config.adapt_batch_size;
  ac.learning_rate = config.adapt_lr;
  ac.beta1 = config.adam_beta1;
  ac.beta2 = config.adam_beta2;
  ac.adam_eps = config.adam_eps;
  ac.seed = config.seed;
  ac.train_backend = config.adapt_backend;
  return ac;
}

ProtocolConfig make_protocol_config(const RunConfig& config, std::uint64_t seed) {
  RunConfig seeded = config;
  seeded.seed = seed;
  ProtocolConfig pc;
  pc.toy.n_classes = config.toy_classes;
  pc.toy.samples_per_class = config.toy_samples_per_class;
  pc.toy.duration_s = config.toy_duration_s;
  pc.toy.sample_rate = config.sample_rate;
  pc.toy.seed = seed;
  pc.noise_kinds = config.noise_kinds;
  pc.snr_grid = config.snr_grid;
  pc.loudness = config.loudness;
  pc.training = make_regime_config(seeded, config.protocol_regime);
  pc.adaptation = make_adapt_config(seeded);
  pc.n_channels = config.channels;
  pc.frontend_defaults = config.frontend;
  pc.segment_s = 0.0;
  pc.adapt_fraction = config.adapt_fraction;
  pc.test_fraction = config.test_fraction;
  pc.babble_sources = config.babble_sources;
  pc.babble_pool_size = config.babble_pool_size;
  return pc;
}

}  // namespace leafkit
