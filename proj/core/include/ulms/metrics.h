// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synthetic Rayleigh channels and weighted sum-rate metrics under power
// pooling with MMSE or SIC reception.
//
// Rates are in bits per RB (log2, unit noise). A user k scheduled on a chunk
// of length L transmits with PSD P_k / L on each RB of the chunk.

#ifndef ULMS_METRICS_H_
#define ULMS_METRICS_H_

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ulms/pair_metrics.h"

namespace ulms {

using Complex = std::complex<double>;

struct ChannelDims {
  int users = 1;
  int tx_antennas = 1;
  int rbs = 1;
  int rx_antennas = 1;
};

struct ChannelOptions {
  int taps = 6;
  int fft_size = 1024;
  int tap_spacing = 3;  // samples between consecutive taps
  int subcarriers_per_rb = 12;
};

// Gains h[u][a][j] in C^{N_r}, stored contiguously.
class ChannelRealization {
 public:
  ChannelRealization() = default;
  explicit ChannelRealization(ChannelDims dims);

  const ChannelDims& dims() const { return dims_; }
  std::span<const Complex> gain(int user, int antenna, int rb) const {
    return {data_.data() + Offset(user, antenna, rb),
            static_cast<size_t>(dims_.rx_antennas)};
  }
  std::span<Complex> mutable_gain(int user, int antenna, int rb) {
    return {data_.data() + Offset(user, antenna, rb),
            static_cast<size_t>(dims_.rx_antennas)};
  }
  // Large-scale amplitude scaling of every gain of `user` by sqrt(power_gain).
  void ScaleUser(int user, double power_gain);

 private:
  size_t Offset(int user, int antenna, int rb) const {
    return ((static_cast<size_t>(user) * dims_.tx_antennas + antenna) *
                dims_.rbs +
            rb) *
           dims_.rx_antennas;
  }

  ChannelDims dims_;
  std::vector<Complex> data_;
};

// Six equal-power i.i.d. complex Gaussian taps per (user, tx antenna, rx
// antenna), each of variance 1/taps; the per-RB gain is the tap frequency
// response at the RB's center subcarrier. Reproducible from `seed`.
ChannelRealization GenerateChannels(const ChannelDims& dims, uint64_t seed,
                                    const ChannelOptions& options = {});

// alpha * log2(1 + psd * |h|^2).
double RateSu(double weight, std::span<const Complex> h, double psd);

struct PairRates {
  double first = 0.0;   // spectral efficiency of the first user passed in
  double second = 0.0;
};

// Unweighted MMSE rates for a co-scheduled pair via Sherman-Morrison.
PairRates MmsePairRates(std::span<const Complex> hu, std::span<const Complex> hv,
                        double psd_u, double psd_v);

// Unweighted SIC rates; `u_interference_free` selects which user is decoded
// after the other has been cancelled.
PairRates SicPairRates(std::span<const Complex> hu, std::span<const Complex> hv,
                       double psd_u, double psd_v, bool u_interference_free);

// Weighted sums for a pair on one RB.
double RateMmsePair(double weight_u, double weight_v,
                    std::span<const Complex> hu, std::span<const Complex> hv,
                    double psd_u, double psd_v);
// Higher weight decoded interference-free; ties favor `u_is_lower_id`'s user.
double RateSicPair(double weight_u, double weight_v,
                   std::span<const Complex> hu, std::span<const Complex> hv,
                   double psd_u, double psd_v, bool u_is_lower_id);

enum class Receiver { kMmse, kSic };

struct UserRadioState {
  double power = 1.0;   // P_k, linear, over unit noise
  double weight = 1.0;  // alpha_k
  double queue_bits = std::numeric_limits<double>::infinity();
};

struct MetricConfig {
  Receiver receiver = Receiver::kMmse;
  bool antenna_selection = false;
  // Ascending spectral efficiencies (bits/RB); empty disables quantization.
  std::vector<double> mcs_table;
};

// A 29-entry LTE-like spectral efficiency table.
std::vector<double> DefaultMcsTable();

// Per-user outcome of scheduling one pair.
struct PairEvaluation {
  double weighted_sum = 0.0;
  std::vector<double> user_bits;  // aligned with the user set, after caps
  std::vector<int> antennas;
};

// Weighted sum-rate provider p(U, c) for a channel realization. Cost units
// follow the metric-complexity model: a single user costs 1 per antenna
// candidate; a set costs |U| (MMSE) or |U| - 1 (SIC) per joint antenna
// choice.
class MetricProvider : public CachedMetrics {
 public:
  MetricProvider(ChannelRealization channel, std::vector<UserRadioState> users,
                 MetricConfig config);

  double CostOf(const UserSet& users) const override;

  // Full evaluation including the chosen antennas; not counted.
  PairEvaluation Evaluate(const UserSet& users, const Chunk& chunk) const;

  const ChannelRealization& channel() const { return channel_; }
  const std::vector<UserRadioState>& users() const { return users_; }
  const MetricConfig& config() const { return config_; }

  // Per-RB weighted rates at an explicit PSD (pre-selection tables).
  double RateSuAt(int user, int antenna, int rb, double psd) const;
  double RateMmseAt(int u, int v, int antenna_u, int antenna_v, int rb,
                    double psd_u, double psd_v) const;
  double RateSicAt(int u, int v, int antenna_u, int antenna_v, int rb,
                   double psd_u, double psd_v) const;

 protected:
  double Compute(const UserSet& users, const Chunk& chunk) override;

 private:
  // Unweighted per-user bits over the chunk for fixed antennas.
  void ChunkRates(const UserSet& users, std::span<const int> antennas,
                  const Chunk& chunk, std::span<double> bits) const;
  double Finish(const UserSet& users, std::span<double> bits,
                const Chunk& chunk) const;
  // Higher weight first; ties by lower id.
  std::vector<int> SicOrder(const UserSet& users) const;

  // |h|^2 on the diagonal and |h_x^H h_y|^2 off it, per RB, indexed by
  // user * tx_antennas + antenna.
  double Gram(int j, int x, int y) const {
    return gram_[(static_cast<size_t>(j) * streams_ + x) * streams_ + y];
  }

  ChannelRealization channel_;
  std::vector<UserRadioState> users_;
  MetricConfig config_;
  int streams_ = 0;
  std::vector<double> gram_;
};

}  // namespace ulms

#endif  // ULMS_METRICS_H_
