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

#include "leafkit/model_io.h"

#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "leafkit/errors.h"
#include "leafkit/text.h"

namespace leafkit {
namespace {

constexpr std::string_view kFormat = "leafkit-model-1";
using Section = std::map<std::string, std::string>;

void put(std::string& out, std::string_view key, std::string_view value) {
  out += key;
  out += '=';
  out += value;
  out += '\n';
}

void put(std::string& out, std::string_view key, const std::vector<double>& v) {
  put(out, key, join_doubles(v));
}

const std::string& get(const Section& s, std::string_view section,
                       const std::string& key) {
  const auto it = s.find(key);
  if (it == s.end()) {
    throw ParseError("model file: [" + std::string(section) + "] lacks '" + key + "'");
  }
  return it->second;
}

std::size_t get_size(const Section& s, std::string_view section, const std::string& key) {
  const long long v = parse_int(get(s, section, key));
  if (v < 0) throw ParseError("model file: negative " + key);
  return static_cast<std::size_t>(v);
}

std::vector<double> get_vec(const Section& s, std::string_view section,
                            const std::string& key) {
  return parse_doubles(get(s, section, key));
}

std::string mask_text(const TrainMask& m) {
  std::string out;
  out += m.filters ? '1' : '0';
  out += ',';
  out += m.pooling ? '1' : '0';
  out += ',';
  out += m.pcen ? '1' : '0';
  out += ',';
  out += m.backend ? '1' : '0';
  return out;
}

TrainMask parse_mask(std::string_view text) {
  const auto f = split(text, ',');
  if (f.size() != 4) throw ParseError("train_mask needs four flags");
  auto flag = [](const std::string& t) {
    if (t == "1") return true;
    if (t == "0") return false;
    throw ParseError("train_mask flag must be 0 or 1");
  };
  return {flag(f[0]), flag(f[1]), flag(f[2]), flag(f[3])};
}

}  // namespace

std::string format_model(const ModelFile& file) {
  const Model& m = file.model;
  const FrontendParams& fe = m.frontend;
  const BackendParams& be = m.backend;
  std::string out;
  out += "[gabor]\n";
  put(out, "kernel_len", std::to_string(fe.bank.kernel_len));
  put(out, "centre_freq", fe.bank.centre_freq);
  put(out, "fwhm", fe.bank.fwhm);
  out += "[pool]\n";
  put(out, "kernel_len", std::to_string(fe.pool.kernel_len));
  put(out, "stride", std::to_string(fe.pool.stride));
  put(out, "sigma", fe.pool.sigma);
  out += "[pcen]\n";
  put(out, "epsilon", format_double(fe.pcen.epsilon));
  put(out, "s", fe.pcen.s);
  put(out, "alpha", fe.pcen.alpha);
  put(out, "delta", fe.pcen.delta);
  put(out, "gamma", fe.pcen.gamma);
  out += "[backend]\n";
  put(out, "input_dim", std::to_string(be.input_dim));
  put(out, "hidden", std::to_string(be.hidden));
  put(out, "n_classes", std::to_string(be.n_classes));
  std::string labels;
  for (std::size_t i = 0; i < file.labels.size(); ++i) {
    if (i) labels += ',';
    labels += file.labels[i];
  }
  put(out, "labels", labels);
  put(out, "input_mean", be.input_mean);
  put(out, "input_scale", be.input_scale);
  put(out, "w1", be.w1);
  put(out, "b1", be.b1);
  put(out, "w2", be.w2);
  put(out, "b2", be.b2);
  out += "[meta]\n";
  put(out, "format", kFormat);
  put(out, "sample_rate", format_double(fe.sample_rate_hz));
  put(out, "train_mask", mask_text(fe.train_mask));
  for (const auto& [k, v] : file.meta) {
    if (k == "format" || k == "sample_rate" || k == "train_mask") continue;
    put(out, k, v);
  }
  return out;
}

ModelFile parse_model(std::string_view text) {
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("malformed section header");
      current = std::string(t.substr(1, t.size() - 2));
      if (sections.count(current)) throw ParseError("duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    if (current.empty()) throw ParseError("model file: key outside a section");
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError("model file: expected key=value");
    sections[current][std::string(t.substr(0, eq))] = std::string(t.substr(eq + 1));
  }
  for (const char* name : {"gabor", "pool", "pcen", "backend", "meta"}) {
    if (!sections.count(name)) {
      throw ParseError(std::string("model file lacks section [") + name + "]");
    }
  }
  const Section& meta = sections["meta"];
  if (get(meta, "meta", "format") != kFormat) {
    throw ParseError("unsupported model format '" + get(meta, "meta", "format") + "'");
  }

  ModelFile file;
  FrontendParams& fe = file.model.frontend;
  fe.sample_rate_hz = parse_double(get(meta, "meta", "sample_rate"));
  fe.train_mask = parse_mask(get(meta, "meta", "train_mask"));
  for (const auto& [k, v] : meta) {
    if (k != "format" && k != "sample_rate" && k != "train_mask") file.meta[k] = v;
  }

  const Section& gabor = sections["gabor"];
  fe.bank.kernel_len = get_size(gabor, "gabor", "kernel_len");
  fe.bank.centre_freq = get_vec(gabor, "gabor", "centre_freq");
  fe.bank.fwhm = get_vec(gabor, "gabor", "fwhm");

  const Section& pool = sections["pool"];
  fe.pool.kernel_len = get_size(pool, "pool", "kernel_len");
  fe.pool.stride = get_size(pool, "pool", "stride");
  fe.pool.sigma = get_vec(pool, "pool", "sigma");

  const Section& pcen = sections["pcen"];
  fe.pcen.epsilon = parse_double(get(pcen, "pcen", "epsilon"));
  fe.pcen.s = get_vec(pcen, "pcen", "s");
  fe.pcen.alpha = get_vec(pcen, "pcen", "alpha");
  fe.pcen.delta = get_vec(pcen, "pcen", "delta");
  fe.pcen.gamma = get_vec(pcen, "pcen", "gamma");

  const Section& be_sec = sections["backend"];
  BackendParams& be = file.model.backend;
  be.input_dim = get_size(be_sec, "backend", "input_dim");
  be.hidden = get_size(be_sec, "backend", "hidden");
  be.n_classes = get_size(be_sec, "backend", "n_classes");
  const std::string& labels = get(be_sec, "backend", "labels");
  if (!labels.empty()) file.labels = split(labels, ',');
  be.input_mean = get_vec(be_sec, "backend", "input_mean");
  be.input_scale = get_vec(be_sec, "backend", "input_scale");
  be.w1 = get_vec(be_sec, "backend", "w1");
  be.b1 = get_vec(be_sec, "backend", "b1");
  be.w2 = get_vec(be_sec, "backend", "w2");
  be.b2 = get_vec(be_sec, "backend", "b2");

  try {
    fe.validate();
    be.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model file is inconsistent: ") + e.what());
  }
  if (be.input_dim != fe.n_channels()) {
    throw ParseError("model file: backend input_dim differs from channel count");
  }
  if (!file.labels.empty() && file.labels.size() != be.n_classes) {
    throw ParseError("model file: label count differs from n_classes");
  }
  return file;
}

void save_model(const std::string& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << format_model(file);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  return parse_model(text);
}

std::string model_section(std::string_view model_text, std::string_view name) {
  const std::string header = "[" + std::string(name) + "]\n";
  const auto start = model_text.find(header);
  if (start == std::string_view::npos) return {};
  const auto next = model_text.find("\n[", start + header.size() - 1);
  const auto end = next == std::string_view::npos ? model_text.size() : next + 1;
  return std::string(model_text.substr(start, end - start));
}

}  // namespace leafkit
