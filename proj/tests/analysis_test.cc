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

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "leafkit/analysis.h"

namespace leafkit {
namespace {

TEST(DriftReport, IdenticalParametersGiveZeros) {
  const FrontendParams p = default_frontend(40, 16000.0);
  const DriftReport r = drift_report(p, p);
  ASSERT_EQ(r.channels.size(), 40u);
  for (const ChannelDrift& d : r.channels) {
    EXPECT_EQ(d.centre_freq, 0.0);
    EXPECT_EQ(d.fwhm_hz, 0.0);
    EXPECT_EQ(d.pool_sigma, 0.0);
    EXPECT_EQ(d.pcen_gamma, 0.0);
  }
  EXPECT_EQ(r.norms, GroupNorms{});
}

TEST(DriftReport, SingleCentreFrequencyShift) {
  const FrontendParams a = default_frontend(40, 16000.0);
  FrontendParams b = a;
  b.bank.centre_freq[7] += 10.0 / 16000.0;
  const DriftReport r = drift_report(a, b);
  for (const ChannelDrift& d : r.channels) {
    if (d.channel == 7) {
      EXPECT_NEAR(d.centre_freq_hz, 10.0, 1e-9);
    } else {
      EXPECT_EQ(d.centre_freq_hz, 0.0);
    }
  }
  EXPECT_GT(r.norms.filters, 0.0);
  EXPECT_EQ(r.norms.pooling, 0.0);
  EXPECT_EQ(r.norms.pcen, 0.0);
}

TEST(DriftReport, AntisymmetricAndRelativeNorms) {
  const FrontendParams a = default_frontend(6, 16000.0);
  FrontendParams b = a;
  for (std::size_t c = 0; c < 6; ++c) {
    b.pcen.alpha[c] += 0.01 * static_cast<double>(c);
    b.pool.sigma[c] *= 1.1;
  }
  const DriftReport ab = drift_report(a, b), ba = drift_report(b, a);
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_EQ(ab.channels[c].pcen_alpha, -ba.channels[c].pcen_alpha);
    EXPECT_EQ(ab.channels[c].pool_sigma, -ba.channels[c].pool_sigma);
  }
  EXPECT_NEAR(ab.norms.pooling, 0.1, 1e-12);
  double num = 0.0;
  for (std::size_t c = 0; c < 6; ++c) num += std::pow(0.01 * static_cast<double>(c), 2);
  const double den = 6.0 * (0.04 * 0.04 + 0.96 * 0.96 + 4.0 + 4.0);
  EXPECT_NEAR(ab.norms.pcen, std::sqrt(num / den), 1e-12);
}

TEST(DriftReport, ShapeMismatchRejected) {
  EXPECT_THROW(drift_report(default_frontend(4, 16000.0), default_frontend(5, 16000.0)),
               std::invalid_argument);
}

TEST(GaussianResponse, UnitDcAndDtftOracle) {
  GaussianPoolParams pool{{0.1, 0.4, 0.4, 1.0}, 401, 160};
  const std::vector<double> grid = linear_grid(0.0, 0.5, 201);
  const auto table = gaussian_response_table(pool, grid);
  ASSERT_EQ(table.size(), 4u);
  EXPECT_EQ(table[1], table[2]);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_NEAR(table[c][0], 1.0, 1e-14);
    const auto w = pool_kernel(pool.sigma[c], 401);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t t = 0; t < w.size(); ++t) {
        acc += w[t] * std::polar(1.0, -2.0 * std::numbers::pi * grid[k] * static_cast<double>(t));
      }
      EXPECT_NEAR(table[c][k], std::abs(acc), 1e-12);
    }
  }
}

TEST(GaussianResponse, NonIncreasingOverMainLobe) {
  // Main lobe: three standard deviations of the untruncated Gaussian transform.
  // Wider kernels are clipped by the window and grow side lobes.
  for (double sigma : {0.1, 0.2, 0.3, 0.4}) {
    GaussianPoolParams pool{{sigma}, 401, 160};
    const double freq_sd = 1.0 / (2.0 * std::numbers::pi * sigma * 200.0);
    const auto grid = linear_grid(0.0, 3.0 * freq_sd, 60);
    const auto row = gaussian_response_table(pool, grid)[0];
    for (std::size_t k = 1; k < row.size(); ++k) EXPECT_LE(row[k], row[k - 1]) << sigma;
  }
}

TEST(GainCurveTable, RowsAndInitChannelsCoincide) {
  const PcenParams init = PcenParams::uniform(40, 0.04, 0.96, 2, 2);
  const auto grid = log_grid(1e-6, 1e2, 17);
  EXPECT_NEAR(grid.front(), 1e-6, 1e-21);
  EXPECT_NEAR(grid.back(), 1e2, 1e-12);
  const auto rows = gain_curve_table(init, grid);
  ASSERT_EQ(rows.size(), 40u * 17u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].gain, rows[i % 17].gain);

  PcenParams trained = init;
  trained.alpha[3] = 0.8;
  const auto moved = gain_curve_table(trained, grid);
  bool differs = false;
  for (std::size_t i = 0; i < rows.size(); ++i) differs |= moved[i].gain != rows[i].gain;
  EXPECT_TRUE(differs);
}

TEST(AnalysisCsv, DriftRoundTrip) {
  const FrontendParams a = default_frontend(5, 16000.0);
  FrontendParams b = a;
  b.bank.fwhm[2] *= 1.0 + 1.0 / 3.0;
  b.pcen.delta[4] = std::nextafter(2.0, 3.0);
  const DriftReport r = drift_report(a, b);
  const std::string csv = drift_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "channel,centre_freq,centre_freq_hz,fwhm,fwhm_hz,pool_sigma,pcen_s,pcen_alpha,"
            "pcen_delta,pcen_gamma");
  EXPECT_EQ(parse_drift_csv(csv), r);
}

TEST(AnalysisCsv, ResponseAndGainRoundTrip) {
  GaussianPoolParams pool{{0.4, 0.33}, 401, 160};
  const auto resp = response_rows("trained", pool, linear_grid(0.0, 0.5, 11));
  ASSERT_EQ(resp.size(), 22u);
  const std::string rcsv = response_csv(resp);
  EXPECT_EQ(rcsv.substr(0, rcsv.find('\n')), "model,channel,freq,magnitude");
  EXPECT_EQ(parse_response_csv(rcsv), resp);

  const auto gains =
      tag_gain_rows("initial", gain_curve_table(PcenParams::uniform(3, 0.04, 0.96, 2, 2),
                                                log_grid(1e-6, 1e2, 9)));
  const std::string gcsv = gains_csv(gains);
  EXPECT_EQ(gcsv.substr(0, gcsv.find('\n')), "model,channel,energy,gain,gain_db");
  EXPECT_EQ(parse_gains_csv(gcsv), gains);
}

}  // namespace
}  // namespace leafkit
