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

#include "leafkit/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "leafkit/errors.h"
#include "leafkit/parallel.h"
#include "leafkit/seeding.h"
#include "leafkit/text.h"

namespace leafkit {

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::kUntrained: return "untrained";
    case Regime::kPcenOnly: return "pcen_only";
    case Regime::kFiltersOnly: return "filters_only";
    case Regime::kFull: return "full";
  }
  return "full";
}

Regime parse_regime(std::string_view token) {
  if (token == "untrained") return Regime::kUntrained;
  if (token == "pcen_only") return Regime::kPcenOnly;
  if (token == "filters_only") return Regime::kFiltersOnly;
  if (token == "full") return Regime::kFull;
  throw std::invalid_argument(
      "unknown regime '" + std::string(token) +
      "' (expected untrained, pcen_only, filters_only or full)");
}

TrainMask mask_for(Regime regime) {
  switch (regime) {
    case Regime::kUntrained: return {false, false, false, true};
    case Regime::kPcenOnly: return {false, false, true, true};
    case Regime::kFiltersOnly: return {true, true, false, true};
    case Regime::kFull: return {true, true, true, true};
  }
  return {};
}

std::string_view protocol_model_name(ProtocolModel model) {
  switch (model) {
    case ProtocolModel::kClean: return "clean";
    case ProtocolModel::kNoisy: return "noisy";
    case ProtocolModel::kBeforeAdaptation: return "ba";
    case ProtocolModel::kPcenAdapted: return "pa";
  }
  return "clean";
}

namespace {

struct ItemOutcome {
  GradientBundle grads;
  double loss = 0.0;
  std::size_t predicted = 0;
};

// Forward + backward for one utterance. `pooled` short-circuits the
// filterbank and pooling stages when they are frozen.
ItemOutcome item_gradient(const Model& model, const Utterance& utt,
                          const FeatureMap* pooled) {
  const FrontendParams& fe = model.frontend;
  const TrainMask& mask = fe.train_mask;
  ItemOutcome out;
  out.grads = GradientBundle::zeros(model);

  FrontendTape tape;
  if (pooled) {
    tape.features = pcen_forward(*pooled, fe.pcen);
  } else {
    tape = frontend_forward(utt.samples, fe);
  }
  const std::vector<double> x = time_average(tape.features);
  BackendStepResult r = backend_backward(model.backend, x, utt.label,
                                         mask.backend ? &out.grads.backend : nullptr);
  out.loss = r.loss;
  out.predicted = r.predicted;

  if (mask.filters || mask.pooling || mask.pcen) {
    FeatureMap upstream(tape.features.channels, tape.features.frames,
                        tape.features.sample_rate_hz, tape.features.hop);
    const double inv = 1.0 / static_cast<double>(tape.features.frames);
    for (std::size_t c = 0; c < upstream.channels; ++c) {
      const double g = r.d_input[c] * inv;
      for (auto& v : upstream.channel(c)) v = g;
    }
    out.grads.frontend = pooled ? pcen_stage_backward(*pooled, fe, upstream)
                                : frontend_backward(utt.samples, fe, tape, upstream);
  }
  return out;
}

std::vector<FeatureMap> pool_all(const Dataset& data, const FrontendParams& fe) {
  std::vector<FeatureMap> pooled(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    pooled[i] = pooled_energy(data.items[i].samples, fe);
  });
  return pooled;
}

void shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
}

void check_dataset(const Dataset& data, const FrontendParams& fe) {
  if (data.empty()) throw std::invalid_argument("dataset is empty");
  if (data.sample_rate != fe.sample_rate_hz) {
    throw std::invalid_argument("dataset sample rate " + format_double(data.sample_rate) +
                                " differs from front-end rate " +
                                format_double(fe.sample_rate_hz));
  }
  for (const auto& utt : data.items) {
    if (utt.samples.empty()) throw std::invalid_argument("utterance '" + utt.id + "' is empty");
    if (utt.label >= data.n_classes()) {
      throw std::invalid_argument("utterance '" + utt.id + "' has label out of range");
    }
  }
}

struct LoopSettings {
  std::size_t epochs = 0;
  std::size_t batch_size = 1;
  std::uint64_t max_steps = std::numeric_limits<std::uint64_t>::max();
};

// Shared mini-batch loop for training and adaptation. Returns steps taken.
std::uint64_t fit(Model& model, const Dataset& data,
                  const std::vector<FeatureMap>* pooled, AdamState& state,
                  const LoopSettings& settings, std::mt19937_64& rng,
                  std::vector<EpochRecord>& history, const StepObserver& observer,
                  const std::function<void()>& on_epoch_end) {
  if (settings.batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::uint64_t steps = 0;
  std::vector<ItemOutcome> outcomes;
  for (std::size_t epoch = 0; epoch < settings.epochs; ++epoch) {
    if (steps >= settings.max_steps) break;
    shuffle(order, rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t seen = 0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += settings.batch_size) {
      if (steps >= settings.max_steps) break;
      const std::size_t nb = std::min(settings.batch_size, order.size() - b0);
      outcomes.assign(nb, ItemOutcome{});
      parallel_for(nb, [&](std::size_t j) {
        const std::size_t idx = order[b0 + j];
        outcomes[j] = item_gradient(model, data.items[idx],
                                    pooled ? &(*pooled)[idx] : nullptr);
      });
      GradientBundle batch = GradientBundle::zeros(model);
      double batch_loss = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        batch.add(outcomes[j].grads);
        batch_loss += outcomes[j].loss;
        if (outcomes[j].predicted == data.items[order[b0 + j]].label) ++correct;
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDivergenceError("non-finite training loss at epoch " +
                                      std::to_string(epoch));
      }
      batch.scale(1.0 / static_cast<double>(nb));
      adam_step(model, batch, state);
      ++steps;
      loss_sum += batch_loss;
      seen += nb;
      if (observer) observer(model, state.step_count);
    }
    if (seen > 0) {
      history.push_back({epoch + 1, loss_sum / static_cast<double>(seen),
                         static_cast<double>(correct) / static_cast<double>(seen)});
    }
    if (on_epoch_end) on_epoch_end();
  }
  return steps;
}

AdamState configured_adam(const Model& model, double lr, double beta1,
                          double beta2, double eps) {
  AdamState state = make_adam(model, lr);
  state.beta1 = beta1;
  state.beta2 = beta2;
  state.eps = eps;
  return state;
}

TrainResult train_impl(const Dataset& dataset, const FrontendParams& frontend,
                       const RegimeConfig& config, const LoopSettings& settings,
                       const StepObserver& observer) {
  frontend.validate();
  check_dataset(dataset, frontend);
  if (dataset.n_classes() < 2) throw std::invalid_argument("need at least two classes");

  Model model;
  model.frontend = frontend;
  model.frontend.train_mask = mask_for(config.regime);
  std::mt19937_64 rng(derive_seed(config.seed, {0x7261696eULL}));
  model.backend = init_backend(frontend.n_channels(), config.hidden_units,
                               dataset.n_classes(), rng);

  std::vector<FeatureMap> pooled;
  const bool cache = model.frontend.train_mask.frontend_frozen_before_pcen();
  if (cache) pooled = pool_all(dataset, model.frontend);

  std::vector<std::vector<double>> inputs(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) {
    inputs[i] = time_average(
        cache ? pcen_forward(pooled[i], model.frontend.pcen)
              : extract_features(dataset.items[i].samples, model.frontend));
  });
  calibrate_backend_input(model.backend, inputs);

  TrainResult result;
  result.initial_frontend = model.frontend;
  AdamState state = configured_adam(model, config.learning_rate, config.beta1,
                                    config.beta2, config.adam_eps);
  result.steps = fit(model, dataset, cache ? &pooled : nullptr, state, settings,
                     rng, result.history, observer, nullptr);
  result.model = std::move(model);
  return result;
}

}  // namespace

TrainResult train(const Dataset& dataset, const FrontendParams& frontend,
                  const RegimeConfig& config, const StepObserver& observer) {
  return train_impl(dataset, frontend, config,
                    {config.epochs, config.batch_size,
                     std::numeric_limits<std::uint64_t>::max()},
                    observer);
}

TrainResult train_steps(const Dataset& dataset, const FrontendParams& frontend,
                        const RegimeConfig& config, std::uint64_t max_steps) {
  const std::size_t per_epoch =
      (dataset.size() + config.batch_size - 1) / std::max<std::size_t>(1, config.batch_size);
  const std::size_t epochs =
      per_epoch == 0 ? 0 : static_cast<std::size_t>((max_steps + per_epoch - 1) / per_epoch);
  return train_impl(dataset, frontend, config,
                    {epochs, config.batch_size, max_steps}, nullptr);
}

std::vector<double> recording_logits(const Model& model,
                                     const std::vector<double>& samples,
                                     double sample_rate, double segment_s) {
  if (!(segment_s > 0.0)) throw std::invalid_argument("segment_s must be > 0");
  const auto seg_len = static_cast<std::size_t>(std::llround(segment_s * sample_rate));
  if (seg_len == 0) throw std::invalid_argument("segment shorter than one sample");
  std::size_t n_seg = samples.size() / seg_len;
  std::vector<double> padded;
  const double* base = samples.data();
  if (n_seg == 0) {
    padded.assign(seg_len, 0.0);
    std::copy(samples.begin(), samples.end(), padded.begin());
    base = padded.data();
    n_seg = 1;
  }
  std::vector<double> mean(model.backend.n_classes, 0.0);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const std::span<const double> segment(base + s * seg_len, seg_len);
    const auto logits = backend_logits(
        model.backend, time_average(extract_features(segment, model.frontend)));
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += logits[k];
  }
  for (auto& v : mean) v /= static_cast<double>(n_seg);
  return mean;
}

double evaluate(const Model& model, const Dataset& dataset, double segment_s) {
  if (dataset.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
  std::vector<char> hit(dataset.size(), 0);
  parallel_for(dataset.size(), [&](std::size_t i) {
    const auto& utt = dataset.items[i];
    hit[i] = argmax(recording_logits(model, utt.samples, dataset.sample_rate,
                                     segment_s)) == utt.label;
  });
  std::size_t correct = 0;
  for (char h : hit) correct += static_cast<std::size_t>(h);
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

AdaptResult adapt_pcen(const Model& source, const Dataset& adapt_set,
                       const AdaptConfig& config) {
  if (adapt_set.empty()) throw std::invalid_argument("adaptation set is empty");
  source.frontend.validate();
  source.backend.validate();
  check_dataset(adapt_set, source.frontend);
  if (adapt_set.n_classes() > source.backend.n_classes) {
    throw std::invalid_argument("adaptation set has more classes than the model");
  }

  AdaptResult result;
  result.model = source;
  result.model.frontend.train_mask = {false, false, true, config.train_backend};
  result.trajectory.push_back(result.model.frontend.pcen);

  const std::vector<FeatureMap> pooled = pool_all(adapt_set, result.model.frontend);
  std::mt19937_64 rng(derive_seed(config.seed, {0x61646170ULL}));
  AdamState state = configured_adam(result.model, config.learning_rate,
                                    config.beta1, config.beta2, config.adam_eps);
  result.steps = fit(result.model, adapt_set, &pooled, state,
                     {config.epochs, config.batch_size,
                      std::numeric_limits<std::uint64_t>::max()},
                     rng, result.history, nullptr,
                     [&] { result.trajectory.push_back(result.model.frontend.pcen); });
  return result;
}

Dataset make_noisy(const Dataset& clean, NoiseKind kind,
                   const std::vector<double>& snr_choices,
                   const std::vector<std::vector<double>>& babble_pool,
                   std::uint64_t seed, std::size_t babble_sources) {
  Dataset out = clean;
  if (snr_choices.empty()) return out;
  for (std::size_t i = 0; i < out.items.size(); ++i) {
    std::mt19937_64 rng(derive_seed(seed, {i}));
    std::uniform_int_distribution<std::size_t> pick(0, snr_choices.size() - 1);
    NoiseSpec spec;
    spec.kind = kind;
    spec.snr_db = snr_choices[pick(rng)];
    spec.seed = rng();
    spec.babble_sources = babble_sources;
    out.items[i].samples = apply_noise(clean.items[i].samples, spec, babble_pool);
  }
  return out;
}

ProtocolSplits make_protocol_splits(const ProtocolConfig& config) {
  const Dataset toy = gen_toy_dataset(config.toy);
  const std::size_t per_class = config.toy.samples_per_class;
  const auto n_adapt = static_cast<std::size_t>(
      std::llround(config.adapt_fraction * static_cast<double>(per_class)));
  const auto n_test = static_cast<std::size_t>(
      std::llround(config.test_fraction * static_cast<double>(per_class)));
  if (n_adapt == 0 || n_test == 0 || n_adapt + n_test >= per_class) {
    throw std::invalid_argument(
        "protocol split leaves an empty train, adapt or test partition");
  }

  ProtocolSplits splits;
  for (Dataset* d : {&splits.train_core, &splits.adapt, &splits.train_full, &splits.test}) {
    d->sample_rate = toy.sample_rate;
    d->label_names = toy.label_names;
  }
  std::vector<std::size_t> seen(toy.n_classes(), 0);
  for (std::size_t i = 0; i < toy.size(); ++i) {
    Utterance utt = toy.items[i];
    std::mt19937_64 rng(derive_seed(config.toy.seed, {0x6c6f7564ULL, i}));
    utt.samples = rescale_loudness(utt.samples, config.loudness, rng);
    const std::size_t k = seen[utt.label]++;
    if (k < per_class - n_adapt - n_test) {
      splits.train_core.items.push_back(utt);
      splits.train_full.items.push_back(std::move(utt));
    } else if (k < per_class - n_test) {
      splits.adapt.items.push_back(utt);
      splits.train_full.items.push_back(std::move(utt));
    } else {
      splits.test.items.push_back(std::move(utt));
    }
  }

  // Babble talkers come from a disjoint toy draw, interleaved across classes.
  if (config.babble_pool_size > 0) {
    ToyDatasetSpec pool_spec = config.toy;
    pool_spec.seed = derive_seed(config.toy.seed, {0x62616262ULL});
    pool_spec.samples_per_class =
        (config.babble_pool_size + pool_spec.n_classes - 1) / pool_spec.n_classes;
    const Dataset pool = gen_toy_dataset(pool_spec);
    for (std::size_t j = 0; j < config.babble_pool_size; ++j) {
      const std::size_t c = j % pool_spec.n_classes;
      const std::size_t k = j / pool_spec.n_classes;
      splits.babble_pool.push_back(
          pool.items[c * pool_spec.samples_per_class + k].samples);
    }
  }
  return splits;
}

std::vector<ProtocolRow> run_noise_protocol(const ProtocolConfig& config) {
  if (config.snr_grid.empty()) throw std::invalid_argument("snr_grid is empty");
  if (config.noise_kinds.empty()) throw std::invalid_argument("noise_kinds is empty");
  const ProtocolSplits splits = make_protocol_splits(config);
  const std::uint64_t seed = config.toy.seed;
  const FrontendParams fe0 =
      default_frontend(config.n_channels, config.toy.sample_rate, config.frontend_defaults);
  const double segment_s = config.segment_s > 0.0 ? config.segment_s : config.toy.duration_s;

  RegimeConfig training = config.training;
  training.seed = seed;
  AdaptConfig adaptation = config.adaptation;
  adaptation.seed = seed;

  std::vector<double> finite_snrs;
  for (double snr : config.snr_grid) {
    if (std::isfinite(snr)) finite_snrs.push_back(snr);
  }

  const Model clean = train(splits.train_full, fe0, training).model;
  const Model ba = train(splits.train_core, fe0, training).model;

  const std::size_t n_kinds = config.noise_kinds.size();
  const std::size_t n_snr = config.snr_grid.size();
  // acc[model][kind][snr]
  std::vector<std::vector<std::vector<double>>> acc(
      4, std::vector<std::vector<double>>(n_kinds, std::vector<double>(n_snr, 0.0)));

  for (std::size_t ki = 0; ki < n_kinds; ++ki) {
    const NoiseKind kind = config.noise_kinds[ki];
    const auto kind_tag = static_cast<std::uint64_t>(kind);
    const Dataset noisy_train =
        make_noisy(splits.train_full, kind, finite_snrs, splits.babble_pool,
                   derive_seed(seed, {kind_tag, 1}), config.babble_sources);
    const Model noisy = train(noisy_train, fe0, training).model;
    const Dataset noisy_adapt =
        make_noisy(splits.adapt, kind, finite_snrs, splits.babble_pool,
                   derive_seed(seed, {kind_tag, 2}), config.babble_sources);
    const Model pa = adapt_pcen(ba, noisy_adapt, adaptation).model;

    for (std::size_t si = 0; si < n_snr; ++si) {
      const Dataset test =
          make_noisy(splits.test, kind, {config.snr_grid[si]}, splits.babble_pool,
                     derive_seed(seed, {kind_tag, 3, si}), config.babble_sources);
      acc[0][ki][si] = evaluate(clean, test, segment_s);
      acc[1][ki][si] = evaluate(noisy, test, segment_s);
      acc[2][ki][si] = evaluate(ba, test, segment_s);
      acc[3][ki][si] = evaluate(pa, test, segment_s);
    }
  }

  const ProtocolModel order[] = {ProtocolModel::kClean, ProtocolModel::kNoisy,
                                 ProtocolModel::kBeforeAdaptation,
                                 ProtocolModel::kPcenAdapted};
  std::vector<ProtocolRow> rows;
  for (std::size_t m = 0; m < 4; ++m) {
    for (std::size_t ki = 0; ki < n_kinds; ++ki) {
      for (std::size_t si = 0; si < n_snr; ++si) {
        rows.push_back({order[m], config.noise_kinds[ki], config.snr_grid[si], seed,
                        acc[m][ki][si]});
      }
    }
  }
  return rows;
}

std::string protocol_csv(const std::vector<ProtocolRow>& rows) {
  std::string out = "model,noise_kind,snr_db,seed,accuracy\n";
  for (const auto& r : rows) {
    out += std::string(protocol_model_name(r.model)) + "," +
           std::string(noise_kind_name(r.noise_kind)) + "," + format_double(r.snr_db) +
           "," + std::to_string(r.seed) + "," + format_double(r.accuracy) + "\n";
  }
  return out;
}

}  // namespace leafkit
