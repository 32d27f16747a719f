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

#include "leafkit/cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>

#include "CLI11.hpp"
#include "leafkit/analysis.h"
#include "leafkit/audio_io.h"
#include "leafkit/errors.h"
#include "leafkit/model_io.h"
#include "leafkit/seeding.h"
#include "leafkit/text.h"

namespace leafkit {
namespace {

constexpr std::size_t kResponsePoints = 257;
constexpr std::size_t kGainPoints = 81;
constexpr double kGainLo = 1e-6;
constexpr double kGainHi = 1e2;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

struct NoiseArg {
  NoiseKind kind;
  double snr_db;
};

NoiseArg parse_noise_arg(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("noise must be kind:snr_db, got '" + std::string(text) + "'");
  }
  return {parse_noise_kind(text.substr(0, colon)), parse_double(text.substr(colon + 1))};
}

void check_rate(double actual, double expected, const std::string& what) {
  if (actual != expected) {
    throw UnsupportedFormatError(what + " has sample rate " + format_double(actual) +
                                 " Hz, config expects " + format_double(expected));
  }
}

void rescale_all(Dataset& data, const RunConfig& config, std::uint64_t tag) {
  if (!config.rescale) return;
  for (std::size_t i = 0; i < data.items.size(); ++i) {
    std::mt19937_64 rng(derive_seed(config.seed, {tag, i}));
    data.items[i].samples = rescale_loudness(data.items[i].samples, config.loudness, rng);
  }
}

std::vector<std::vector<double>> babble_pool_for(const RunConfig& config,
                                                 const Manifest* fallback) {
  std::vector<std::vector<double>> pool;
  if (!config.noise_manifest.empty()) {
    const Manifest noise = load_manifest(config.noise_manifest);
    for (const ManifestRow& row : noise.rows) {
      WavData wav = read_wav(resolve_path(noise, row));
      check_rate(wav.sample_rate, config.sample_rate, resolve_path(noise, row));
      pool.push_back(std::move(wav.samples));
    }
  } else if (fallback != nullptr) {
    const Dataset train = load_split(*fallback, Split::kTrain, config.sample_rate);
    for (const Utterance& u : train.items) {
      if (pool.size() == config.babble_pool_size) break;
      pool.push_back(u.samples);
    }
  }
  if (pool.size() < config.babble_sources) {
    throw std::invalid_argument("babble needs at least " +
                                std::to_string(config.babble_sources) +
                                " pool recordings (set noise_manifest)");
  }
  return pool;
}

std::string history_csv_text(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,loss,accuracy\n";
  for (const EpochRecord& r : history) {
    out += std::to_string(r.epoch) + ',' + format_double(r.loss) + ',' +
           format_double(r.accuracy) + '\n';
  }
  return out;
}

std::string trajectory_csv_text(const std::vector<PcenParams>& trajectory) {
  std::string out = "epoch,channel,s,alpha,delta,gamma\n";
  for (std::size_t e = 0; e < trajectory.size(); ++e) {
    const PcenParams& p = trajectory[e];
    for (std::size_t c = 0; c < p.s.size(); ++c) {
      out += std::to_string(e) + ',' + std::to_string(c) + ',' + format_double(p.s[c]) + ',' +
             format_double(p.alpha[c]) + ',' + format_double(p.delta[c]) + ',' +
             format_double(p.gamma[c]) + '\n';
    }
  }
  return out;
}

}  // namespace

std::string features_csv(const FeatureMap& features) {
  std::string out;
  for (std::size_t c = 0; c < features.channels; ++c) {
    if (c) out += ',';
    out += std::to_string(c);
  }
  out += '\n';
  for (std::size_t t = 0; t < features.frames; ++t) {
    for (std::size_t c = 0; c < features.channels; ++c) {
      if (c) out += ',';
      out += format_double(features.at(c, t));
    }
    out += '\n';
  }
  return out;
}

void cmd_extract(const std::string& wav_path, const std::string& out_csv,
                 const RunConfig& config) {
  const WavData wav = read_wav(wav_path);
  check_rate(wav.sample_rate, config.sample_rate, wav_path);
  const FeatureMap features = extract_features(wav.samples, make_frontend(config));
  write_text(out_csv, features_csv(features));
}

void cmd_train(const std::string& manifest_path, Regime regime, const RunConfig& config,
               const std::string& out_model, const std::string& history_csv) {
  const Manifest manifest = load_manifest(manifest_path);
  Dataset train_set = load_split(manifest, Split::kTrain, config.sample_rate);
  if (train_set.empty()) throw DegenerateInputError("manifest has no train rows");
  rescale_all(train_set, config, 0x74726eULL);

  const TrainResult result =
      train(train_set, make_frontend(config), make_regime_config(config, regime));
  ModelFile file;
  file.model = result.model;
  file.labels = manifest.labels;
  file.meta["regime"] = std::string(regime_name(regime));
  file.meta["seed"] = std::to_string(config.seed);
  file.meta["epochs"] = std::to_string(config.epochs);
  file.meta["steps"] = std::to_string(result.steps);
  save_model(out_model, file);
  if (!history_csv.empty()) write_text(history_csv, history_csv_text(result.history));
}

void cmd_adapt(const std::string& model_path, const std::string& manifest_path,
               const std::string& noise, const RunConfig& config,
               const std::string& out_model, const std::string& trajectory_csv) {
  const NoiseArg arg = parse_noise_arg(noise);
  ModelFile file = load_model(model_path);
  check_rate(file.model.frontend.sample_rate_hz, config.sample_rate, model_path);
  std::optional<std::vector<std::string>> declared;
  if (!file.labels.empty()) declared = file.labels;
  const Manifest manifest = load_manifest(manifest_path, declared);
  Dataset adapt_set = load_split(manifest, Split::kAdapt, config.sample_rate);
  if (adapt_set.empty()) throw DegenerateInputError("manifest has no adapt rows");
  rescale_all(adapt_set, config, 0x616470ULL);

  std::vector<std::vector<double>> pool;
  if (arg.kind == NoiseKind::kBabble) pool = babble_pool_for(config, &manifest);
  const Dataset noisy = make_noisy(adapt_set, arg.kind, {arg.snr_db}, pool,
                                   derive_seed(config.seed, {0x6e6f6973ULL}),
                                   config.babble_sources);

  const AdaptResult result = adapt_pcen(file.model, noisy, make_adapt_config(config));
  file.model = result.model;
  file.meta["adapted_noise"] = std::string(noise);
  file.meta["adapt_epochs"] = std::to_string(config.adapt_epochs);
  file.meta["adapt_steps"] = std::to_string(result.steps);
  save_model(out_model, file);
  if (!trajectory_csv.empty()) write_text(trajectory_csv, trajectory_csv_text(result.trajectory));
}

void cmd_analyze(const std::string& initial_model, const std::string& trained_model,
                 const std::string& out_dir) {
  const ModelFile initial = load_model(initial_model);
  const ModelFile trained = load_model(trained_model);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  write_text((dir / "drift.csv").string(),
             drift_csv(drift_report(initial.model.frontend, trained.model.frontend)));

  const std::vector<double> freqs = linear_grid(0.0, 0.5, kResponsePoints);
  std::vector<ResponseRow> responses =
      response_rows("initial", initial.model.frontend.pool, freqs);
  for (ResponseRow& r : response_rows("trained", trained.model.frontend.pool, freqs)) {
    responses.push_back(std::move(r));
  }
  write_text((dir / "gaussian_response.csv").string(), response_csv(responses));

  const std::vector<double> grid = log_grid(kGainLo, kGainHi, kGainPoints);
  std::vector<TaggedGainRow> gains =
      tag_gain_rows("initial", gain_curve_table(initial.model.frontend.pcen, grid));
  for (TaggedGainRow& r :
       tag_gain_rows("trained", gain_curve_table(trained.model.frontend.pcen, grid))) {
    gains.push_back(std::move(r));
  }
  write_text((dir / "pcen_gains.csv").string(), gains_csv(gains));
}

void cmd_protocol(const RunConfig& config, const std::string& out_csv) {
  std::vector<ProtocolRow> rows;
  for (std::uint64_t seed : config.protocol_seeds) {
    for (const ProtocolRow& r : run_noise_protocol(make_protocol_config(config, seed))) {
      rows.push_back(r);
    }
  }
  write_text(out_csv, protocol_csv(rows));
}

void cmd_mix(const std::string& in_wav, const std::string& noise, const RunConfig& config,
             const std::string& out_wav) {
  const NoiseArg arg = parse_noise_arg(noise);
  const WavData wav = read_wav(in_wav);
  check_rate(wav.sample_rate, config.sample_rate, in_wav);
  std::vector<std::vector<double>> pool;
  if (arg.kind == NoiseKind::kBabble) pool = babble_pool_for(config, nullptr);
  NoiseSpec spec;
  spec.kind = arg.kind;
  spec.snr_db = arg.snr_db;
  spec.seed = config.seed;
  spec.babble_sources = config.babble_sources;
  write_wav(out_wav, apply_noise(wav.samples, spec, pool), wav.sample_rate);
}

void cmd_gen_toy(const std::string& out_dir, const RunConfig& config) {
  ToyDatasetSpec spec;
  spec.n_classes = config.toy_classes;
  spec.samples_per_class = config.toy_samples_per_class;
  spec.duration_s = config.toy_duration_s;
  spec.sample_rate = config.sample_rate;
  spec.seed = config.seed;
  const Dataset toy = gen_toy_dataset(spec);

  const std::size_t per_class = spec.samples_per_class;
  const auto n_adapt = static_cast<std::size_t>(
      std::llround(config.adapt_fraction * static_cast<double>(per_class)));
  const auto n_test = static_cast<std::size_t>(
      std::llround(config.test_fraction * static_cast<double>(per_class)));
  if (n_adapt + n_test >= per_class) {
    throw DegenerateInputError("toy split leaves no training items");
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::string manifest = "path,label,split\n";
  std::vector<std::size_t> seen(toy.n_classes(), 0);
  for (const Utterance& u : toy.items) {
    const std::size_t k = seen[u.label]++;
    Split split = Split::kTrain;
    if (k >= per_class - n_test) {
      split = Split::kTest;
    } else if (k >= per_class - n_test - n_adapt) {
      split = Split::kAdapt;
    }
    const std::string name = u.id + ".wav";
    write_wav((dir / name).string(), u.samples,
              static_cast<std::uint32_t>(spec.sample_rate));
    manifest += name + ',' + toy.label_names[u.label] + ',' +
                std::string(split_name(split)) + '\n';
  }
  write_text((dir / "manifest.csv").string(), manifest);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"leafkit: learnable audio front-end toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config,--toy-config", config_path, "key=value run configuration");

  std::string in_path, out_path, manifest_path, regime_token = "full", history_path;
  std::string model_path, noise, trajectory_path, initial_path, trained_path;

  CLI::App* extract = app.add_subcommand("extract", "WAV to feature CSV");
  extract->add_option("--in", in_path)->required();
  extract->add_option("--out", out_path)->required();

  CLI::App* train_cmd = app.add_subcommand("train", "train a model from a manifest");
  train_cmd->add_option("--manifest", manifest_path)->required();
  train_cmd->add_option("--regime", regime_token, "untrained|pcen_only|filters_only|full");
  train_cmd->add_option("--out", out_path)->required();
  train_cmd->add_option("--history", history_path, "epoch,loss,accuracy CSV");

  CLI::App* adapt = app.add_subcommand("adapt", "adapt the PCEN layer to noise");
  adapt->add_option("--model", model_path)->required();
  adapt->add_option("--manifest", manifest_path)->required();
  adapt->add_option("--noise", noise, "kind:snr_db")->required();
  adapt->add_option("--out", out_path)->required();
  adapt->add_option("--trajectory", trajectory_path, "PCEN trajectory CSV");

  CLI::App* analyze = app.add_subcommand("analyze", "compare two models");
  analyze->add_option("--initial", initial_path)->required();
  analyze->add_option("--trained", trained_path)->required();
  analyze->add_option("--out", out_path)->required();

  CLI::App* protocol = app.add_subcommand("protocol", "four-model noise protocol on toy data");
  protocol->add_option("--out", out_path)->required();

  CLI::App* mix = app.add_subcommand("mix", "add noise to a WAV at a given SNR");
  mix->add_option("--in", in_path)->required();
  mix->add_option("--noise", noise, "kind:snr_db")->required();
  mix->add_option("--out", out_path)->required();

  CLI::App* gen_toy = app.add_subcommand("gen-toy", "write a toy dataset and manifest");
  gen_toy->add_option("--out", out_path)->required();

  for (CLI::App* sub : {extract, train_cmd, adapt, analyze, protocol, mix, gen_toy}) {
    sub->add_option("--config,--toy-config", config_path, "key=value run configuration");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    config.validate();
    if (extract->parsed()) {
      cmd_extract(in_path, out_path, config);
    } else if (train_cmd->parsed()) {
      cmd_train(manifest_path, parse_regime(regime_token), config, out_path, history_path);
    } else if (adapt->parsed()) {
      cmd_adapt(model_path, manifest_path, noise, config, out_path, trajectory_path);
    } else if (analyze->parsed()) {
      cmd_analyze(initial_path, trained_path, out_path);
    } else if (protocol->parsed()) {
      cmd_protocol(config, out_path);
    } else if (mix->parsed()) {
      cmd_mix(in_path, noise, config, out_path);
    } else if (gen_toy->parsed()) {
      cmd_gen_toy(out_path, config);
    }
  } catch (const std::exception& e) {
    std::cerr << "leafkit: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace leafkit
