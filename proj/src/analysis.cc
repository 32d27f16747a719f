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

#include "leafkit/analysis.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "leafkit/errors.h"
#include "leafkit/text.h"

namespace leafkit {
namespace {

double sq_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

double sq_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    acc += d * d;
  }
  return acc;
}

double ratio(double num_sq, double den_sq) {
  if (num_sq == 0.0) return 0.0;
  return std::sqrt(num_sq) / std::sqrt(den_sq);
}

std::vector<std::string> lines(std::string_view text) {
  std::vector<std::string> out;
  for (auto& l : split(text, '\n')) {
    if (!trim(l).empty()) out.emplace_back(trim(l));
  }
  return out;
}

void expect_header(const std::vector<std::string>& ls, std::string_view header) {
  if (ls.empty() || ls.front() != header) {
    throw ParseError("expected CSV header '" + std::string(header) + "'");
  }
}

std::vector<std::string> fields(const std::string& line, std::size_t n) {
  auto f = split(line, ',');
  if (f.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " fields in '" + line + "'");
  }
  return f;
}

std::size_t parse_index(std::string_view token) {
  const long long v = parse_int(token);
  if (v < 0) throw ParseError("negative index");
  return static_cast<std::size_t>(v);
}

constexpr std::string_view kDriftHeader =
    "channel,centre_freq,centre_freq_hz,fwhm,fwhm_hz,pool_sigma,pcen_s,"
    "pcen_alpha,pcen_delta,pcen_gamma";
constexpr std::string_view kResponseHeader = "model,channel,freq,magnitude";
constexpr std::string_view kGainsHeader = "model,channel,energy,gain,gain_db";

}  // namespace

DriftReport drift_report(const FrontendParams& initial,
                         const FrontendParams& trained) {
  const std::size_t n = initial.n_channels();
  if (trained.n_channels() != n || initial.pool.n_channels() != n ||
      trained.pool.n_channels() != n || initial.pcen.n_channels() != n ||
      trained.pcen.n_channels() != n || initial.bank.fwhm.size() != n ||
      trained.bank.fwhm.size() != n) {
    throw std::invalid_argument("drift_report: parameter shapes differ");
  }
  const double sr = initial.sample_rate_hz;
  DriftReport report;
  report.channels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ChannelDrift& d = report.channels[i];
    d.channel = i;
    d.centre_freq = trained.bank.centre_freq[i] - initial.bank.centre_freq[i];
    d.centre_freq_hz = d.centre_freq * sr;
    d.fwhm = trained.bank.fwhm[i] - initial.bank.fwhm[i];
    d.fwhm_hz = d.fwhm * sr;
    d.pool_sigma = trained.pool.sigma[i] - initial.pool.sigma[i];
    d.pcen_s = trained.pcen.s[i] - initial.pcen.s[i];
    d.pcen_alpha = trained.pcen.alpha[i] - initial.pcen.alpha[i];
    d.pcen_delta = trained.pcen.delta[i] - initial.pcen.delta[i];
    d.pcen_gamma = trained.pcen.gamma[i] - initial.pcen.gamma[i];
  }
  const auto& a = initial;
  const auto& b = trained;
  report.norms.filters =
      ratio(sq_diff(a.bank.centre_freq, b.bank.centre_freq) +
                sq_diff(a.bank.fwhm, b.bank.fwhm),
            sq_norm(a.bank.centre_freq) + sq_norm(a.bank.fwhm));
  report.norms.pooling = ratio(sq_diff(a.pool.sigma, b.pool.sigma), sq_norm(a.pool.sigma));
  report.norms.pcen = ratio(
      sq_diff(a.pcen.s, b.pcen.s) + sq_diff(a.pcen.alpha, b.pcen.alpha) +
          sq_diff(a.pcen.delta, b.pcen.delta) + sq_diff(a.pcen.gamma, b.pcen.gamma),
      sq_norm(a.pcen.s) + sq_norm(a.pcen.alpha) + sq_norm(a.pcen.delta) +
          sq_norm(a.pcen.gamma));
  return report;
}

std::vector<std::vector<double>> gaussian_response_table(
    const GaussianPoolParams& pool, std::span<const double> freq_grid) {
  pool.validate();
  for (double f : freq_grid) {
    if (!(f >= 0.0 && f <= 0.5)) {
      throw std::invalid_argument("frequency grid must lie in [0, 0.5]");
    }
  }
  const double half = static_cast<double>(pool.kernel_len / 2);
  std::vector<std::vector<double>> table;
  table.reserve(pool.n_channels());
  for (double sigma : pool.sigma) {
    const std::vector<double> w = pool_kernel(sigma, pool.kernel_len);
    std::vector<double> row;
    row.reserve(freq_grid.size());
    for (double f : freq_grid) {
      double re = 0.0;
      double im = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        const double phase = -2.0 * std::numbers::pi * f * (static_cast<double>(k) - half);
        re += w[k] * std::cos(phase);
        im += w[k] * std::sin(phase);
      }
      row.push_back(std::hypot(re, im));
    }
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<GainRow> gain_curve_table(const PcenParams& pcen,
                                      std::span<const double> grid) {
  std::vector<GainRow> rows;
  rows.reserve(pcen.n_channels() * grid.size());
  for (std::size_t c = 0; c < pcen.n_channels(); ++c) {
    for (const GainPoint& p : gain_curve(pcen, c, grid)) {
      rows.push_back({c, p.input, p.gain, p.gain_db});
    }
  }
  return rows;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo) || n == 0) {
    throw std::invalid_argument("log_grid needs 0 < lo <= hi and n >= 1");
  }
  std::vector<double> g(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    g[i] = std::pow(10.0, a + t * (b - a));
  }
  return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0 || hi < lo) throw std::invalid_argument("linear_grid needs lo <= hi, n >= 1");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    g[i] = lo + t * (hi - lo);
  }
  return g;
}

std::string drift_csv(const DriftReport& report) {
  std::string out(kDriftHeader);
  out += '\n';
  for (const ChannelDrift& d : report.channels) {
    const double values[] = {d.centre_freq, d.centre_freq_hz, d.fwhm, d.fwhm_hz,
                             d.pool_sigma, d.pcen_s, d.pcen_alpha, d.pcen_delta,
                             d.pcen_gamma};
    out += std::to_string(d.channel) + "," + join_doubles(values) + "\n";
  }
  const double norms[] = {report.norms.filters, report.norms.pooling,
                          report.norms.pcen};
  out += "#norms," + join_doubles(norms) + "\n";
  return out;
}

DriftReport parse_drift_csv(std::string_view text) {
  const auto ls = lines(text);
  expect_header(ls, kDriftHeader);
  DriftReport report;
  bool have_norms = false;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (ls[i].rfind("#norms,", 0) == 0) {
      const auto f = fields(ls[i], 4);
      report.norms = {parse_double(f[1]), parse_double(f[2]), parse_double(f[3])};
      have_norms = true;
      continue;
    }
    const auto f = fields(ls[i], 10);
    ChannelDrift d;
    d.channel = parse_index(f[0]);
    d.centre_freq = parse_double(f[1]);
    d.centre_freq_hz = parse_double(f[2]);
    d.fwhm = parse_double(f[3]);
    d.fwhm_hz = parse_double(f[4]);
    d.pool_sigma = parse_double(f[5]);
    d.pcen_s = parse_double(f[6]);
    d.pcen_alpha = parse_double(f[7]);
    d.pcen_delta = parse_double(f[8]);
    d.pcen_gamma = parse_double(f[9]);
    report.channels.push_back(d);
  }
  if (!have_norms) throw ParseError("drift CSV lacks the #norms line");
  return report;
}

std::vector<ResponseRow> response_rows(std::string_view model_tag,
                                       const GaussianPoolParams& pool,
                                       std::span<const double> freq_grid) {
  const auto table = gaussian_response_table(pool, freq_grid);
  std::vector<ResponseRow> rows;
  for (std::size_t c = 0; c < table.size(); ++c) {
    for (std::size_t k = 0; k < freq_grid.size(); ++k) {
      rows.push_back({std::string(model_tag), c, freq_grid[k], table[c][k]});
    }
  }
  return rows;
}

std::string response_csv(const std::vector<ResponseRow>& rows) {
  std::string out(kResponseHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.model + "," + std::to_string(r.channel) + "," + format_double(r.freq) +
           "," + format_double(r.magnitude) + "\n";
  }
  return out;
}

std::vector<ResponseRow> parse_response_csv(std::string_view text) {
  const auto ls = lines(text);
  expect_header(ls, kResponseHeader);
  std::vector<ResponseRow> rows;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = fields(ls[i], 4);
    rows.push_back({f[0], parse_index(f[1]), parse_double(f[2]), parse_double(f[3])});
  }
  return rows;
}

std::vector<TaggedGainRow> tag_gain_rows(std::string_view model_tag,
                                         const std::vector<GainRow>& rows) {
  std::vector<TaggedGainRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({std::string(model_tag), r});
  return out;
}

std::string gains_csv(const std::vector<TaggedGainRow>& rows) {
  std::string out(kGainsHeader);
  out += '\n';
  for (const auto& t : rows) {
    out += t.model + "," + std::to_string(t.row.channel) + "," +
           format_double(t.row.input) + "," + format_double(t.row.gain) + "," +
           format_double(t.row.gain_db) + "\n";
  }
  return out;
}

std::vector<TaggedGainRow> parse_gains_csv(std::string_view text) {
  const auto ls = lines(text);
  expect_header(ls, kGainsHeader);
  std::vector<TaggedGainRow> rows;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = fields(ls[i], 5);
    rows.push_back({f[0],
                    {parse_index(f[1]), parse_double(f[2]), parse_double(f[3]),
                     parse_double(f[4])}});
  }
  return rows;
}

}  // namespace leafkit
