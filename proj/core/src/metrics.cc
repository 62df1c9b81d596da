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

#include "ulms/metrics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "ulms/error.h"

namespace ulms {

namespace {

double NormSquared(std::span<const Complex> h) {
  double total = 0.0;
  for (const Complex& x : h) total += std::norm(x);
  return total;
}

double InnerSquared(std::span<const Complex> a, std::span<const Complex> b) {
  Complex dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += std::conj(a[i]) * b[i];
  return std::norm(dot);
}

}  // namespace

ChannelRealization::ChannelRealization(ChannelDims dims) : dims_(dims) {
  if (dims.users < 1 || dims.tx_antennas < 1 || dims.rbs < 1 ||
      dims.rx_antennas < 1) {
    throw Error(ErrorCode::kInvalidArgument, "channel dimensions must be >= 1");
  }
  data_.assign(static_cast<size_t>(dims.users) * dims.tx_antennas * dims.rbs *
                   dims.rx_antennas,
               Complex(0.0, 0.0));
}

void ChannelRealization::ScaleUser(int user, double power_gain) {
  const double amplitude = std::sqrt(power_gain);
  for (int a = 0; a < dims_.tx_antennas; ++a) {
    for (int j = 0; j < dims_.rbs; ++j) {
      for (Complex& x : mutable_gain(user, a, j)) x *= amplitude;
    }
  }
}

ChannelRealization GenerateChannels(const ChannelDims& dims, uint64_t seed,
                                    const ChannelOptions& options) {
  if (options.taps < 1 || options.fft_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "channel needs taps and an FFT size");
  }
  ChannelRealization channel(dims);
  std::mt19937_64 rng(seed);
  const double sigma = std::sqrt(0.5 / options.taps);
  std::normal_distribution<double> gauss(0.0, sigma);

  // Phase rotation of tap l at the center subcarrier of RB j.
  std::vector<Complex> rotation(static_cast<size_t>(options.taps) * dims.rbs);
  for (int l = 0; l < options.taps; ++l) {
    for (int j = 0; j < dims.rbs; ++j) {
      const double subcarrier =
          j * options.subcarriers_per_rb + options.subcarriers_per_rb / 2;
      const double phase = -2.0 * std::numbers::pi * l * options.tap_spacing *
                           subcarrier / options.fft_size;
      rotation[static_cast<size_t>(l) * dims.rbs + j] = std::polar(1.0, phase);
    }
  }

  std::vector<Complex> taps(options.taps);
  for (int u = 0; u < dims.users; ++u) {
    for (int a = 0; a < dims.tx_antennas; ++a) {
      for (int r = 0; r < dims.rx_antennas; ++r) {
        for (Complex& tap : taps) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          tap = Complex(re, im);
        }
        for (int j = 0; j < dims.rbs; ++j) {
          Complex response = 0.0;
          for (int l = 0; l < options.taps; ++l) {
            response += taps[l] * rotation[static_cast<size_t>(l) * dims.rbs + j];
          }
          channel.mutable_gain(u, a, j)[r] = response;
        }
      }
    }
  }
  return channel;
}

double RateSu(double weight, std::span<const Complex> h, double psd) {
  return weight * std::log2(1.0 + psd * NormSquared(h));
}

namespace {

PairRates MmseFromGram(double norm_u, double norm_v, double inner,
                       double psd_u, double psd_v) {
  const double a = psd_u * norm_u;
  const double b = psd_v * norm_v;
  const double c = psd_u * psd_v * inner;
  // h_u^H (I + h_v h_v^H)^{-1} h_u = |h_u|^2 - |h_v^H h_u|^2 / (1 + |h_v|^2).
  const double sinr_u = std::max(0.0, a - c / (1.0 + b));
  const double sinr_v = std::max(0.0, b - c / (1.0 + a));
  return {std::log2(1.0 + sinr_u), std::log2(1.0 + sinr_v)};
}

PairRates SicFromGram(double norm_u, double norm_v, double inner,
                      double psd_u, double psd_v, bool u_interference_free) {
  const double a = psd_u * norm_u;
  const double b = psd_v * norm_v;
  const double c = psd_u * psd_v * inner;
  if (u_interference_free) {
    return {std::log2(1.0 + a), std::log2(1.0 + std::max(0.0, b - c / (1.0 + a)))};
  }
  return {std::log2(1.0 + std::max(0.0, a - c / (1.0 + b))), std::log2(1.0 + b)};
}

}  // namespace

PairRates MmsePairRates(std::span<const Complex> hu, std::span<const Complex> hv,
                        double psd_u, double psd_v) {
  return MmseFromGram(NormSquared(hu), NormSquared(hv), InnerSquared(hu, hv),
                      psd_u, psd_v);
}

PairRates SicPairRates(std::span<const Complex> hu, std::span<const Complex> hv,
                       double psd_u, double psd_v, bool u_interference_free) {
  return SicFromGram(NormSquared(hu), NormSquared(hv), InnerSquared(hu, hv),
                     psd_u, psd_v, u_interference_free);
}

double RateMmsePair(double weight_u, double weight_v,
                    std::span<const Complex> hu, std::span<const Complex> hv,
                    double psd_u, double psd_v) {
  const PairRates rates = MmsePairRates(hu, hv, psd_u, psd_v);
  return weight_u * rates.first + weight_v * rates.second;
}

double RateSicPair(double weight_u, double weight_v,
                   std::span<const Complex> hu, std::span<const Complex> hv,
                   double psd_u, double psd_v, bool u_is_lower_id) {
  const bool u_first =
      weight_u > weight_v || (weight_u == weight_v && u_is_lower_id);
  const PairRates rates = SicPairRates(hu, hv, psd_u, psd_v, u_first);
  return weight_u * rates.first + weight_v * rates.second;
}

std::vector<double> DefaultMcsTable() {
  return {0.15, 0.19, 0.23, 0.31, 0.38, 0.49, 0.60, 0.74, 0.88, 1.03,
          1.18, 1.33, 1.48, 1.70, 1.91, 2.16, 2.41, 2.57, 2.73, 3.03,
          3.32, 3.61, 3.90, 4.21, 4.52, 4.82, 5.12, 5.33, 5.55};
}

MetricProvider::MetricProvider(ChannelRealization channel,
                               std::vector<UserRadioState> users,
                               MetricConfig config)
    : channel_(std::move(channel)),
      users_(std::move(users)),
      config_(std::move(config)) {
  if (static_cast<int>(users_.size()) != channel_.dims().users) {
    throw Error(ErrorCode::kInvalidArgument,
                "radio state count differs from channel users");
  }
  for (const auto& user : users_) {
    if (!(user.power > 0.0) || !(user.weight >= 0.0) ||
        !(user.queue_bits >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "user needs P > 0, weight >= 0, queue >= 0");
    }
  }
  if (!std::is_sorted(config_.mcs_table.begin(), config_.mcs_table.end())) {
    throw Error(ErrorCode::kInvalidArgument, "MCS table must be ascending");
  }
  const ChannelDims& dims = channel_.dims();
  streams_ = dims.users * dims.tx_antennas;
  gram_.assign(static_cast<size_t>(dims.rbs) * streams_ * streams_, 0.0);
  for (int j = 0; j < dims.rbs; ++j) {
    for (int x = 0; x < streams_; ++x) {
      const auto hx = channel_.gain(x / dims.tx_antennas, x % dims.tx_antennas, j);
      double* row = &gram_[(static_cast<size_t>(j) * streams_ + x) * streams_];
      row[x] = NormSquared(hx);
      for (int y = x + 1; y < streams_; ++y) {
        row[y] = InnerSquared(
            hx, channel_.gain(y / dims.tx_antennas, y % dims.tx_antennas, j));
        gram_[(static_cast<size_t>(j) * streams_ + y) * streams_ + x] = row[y];
      }
    }
  }
}

double MetricProvider::CostOf(const UserSet& users) const {
  const int n = users.size();
  const double combos =
      config_.antenna_selection
          ? std::pow(static_cast<double>(channel_.dims().tx_antennas), n)
          : 1.0;
  double per_combo = 1.0;
  if (n >= 2) per_combo = config_.receiver == Receiver::kMmse ? n : n - 1;
  return combos * per_combo;
}

std::vector<int> MetricProvider::SicOrder(const UserSet& users) const {
  std::vector<int> order(users.users().begin(), users.users().end());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return users_[a].weight > users_[b].weight;
  });
  return order;
}

void MetricProvider::ChunkRates(const UserSet& users,
                                std::span<const int> antennas,
                                const Chunk& chunk,
                                std::span<double> bits) const {
  const int n = users.size();
  const double length = chunk.length();
  std::fill(bits.begin(), bits.end(), 0.0);
  if (n == 1) {
    const double psd = users_[users[0]].power / length;
    const int x = users[0] * channel_.dims().tx_antennas + antennas[0];
    for (int j = chunk.head; j <= chunk.tail; ++j) {
      bits[0] += std::log2(1.0 + psd * Gram(j, x, x));
    }
    return;
  }
  if (n == 2) {
    const int u = users[0];
    const int v = users[1];
    const double psd_u = users_[u].power / length;
    const double psd_v = users_[v].power / length;
    const bool sic = config_.receiver == Receiver::kSic;
    const bool u_first = users_[u].weight >= users_[v].weight;
    const int tx = channel_.dims().tx_antennas;
    const int x = u * tx + antennas[0];
    const int y = v * tx + antennas[1];
    for (int j = chunk.head; j <= chunk.tail; ++j) {
      const double nu = Gram(j, x, x);
      const double nv = Gram(j, y, y);
      const double inner = Gram(j, x, y);
      const PairRates rates = sic ? SicFromGram(nu, nv, inner, psd_u, psd_v, u_first)
                                  : MmseFromGram(nu, nv, inner, psd_u, psd_v);
      bits[0] += rates.first;
      bits[1] += rates.second;
    }
    return;
  }

  // General sets: explicit N_r x N_r covariance solves.
  const int rx = channel_.dims().rx_antennas;
  std::vector<int> rank(n, 0);
  if (config_.receiver == Receiver::kSic) {
    const std::vector<int> order = SicOrder(users);
    for (int r = 0; r < n; ++r) {
      const int pos = static_cast<int>(
          std::find(users.users().begin(), users.users().end(), order[r]) -
          users.users().begin());
      rank[pos] = r;
    }
  }
  Eigen::MatrixXcd cov(rx, rx);
  Eigen::VectorXcd h(rx);
  for (int j = chunk.head; j <= chunk.tail; ++j) {
    for (int k = 0; k < n; ++k) {
      cov.setIdentity();
      for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        // MMSE: every other user interferes. SIC: only users decoded later
        // (higher priority) remain.
        if (config_.receiver == Receiver::kSic && rank[i] > rank[k]) continue;
        const auto g = channel_.gain(users[i], antennas[i], j);
        const double psd = users_[users[i]].power / length;
        for (int r = 0; r < rx; ++r) h(r) = g[r];
        cov.noalias() += psd * h * h.adjoint();
      }
      const auto g = channel_.gain(users[k], antennas[k], j);
      for (int r = 0; r < rx; ++r) h(r) = g[r];
      const double psd = users_[users[k]].power / length;
      const Eigen::VectorXcd solved = cov.ldlt().solve(h);
      const double sinr = std::max(0.0, psd * h.dot(solved).real());
      bits[k] += std::log2(1.0 + sinr);
    }
  }
}

double MetricProvider::Finish(const UserSet& users, std::span<double> bits,
                              const Chunk& chunk) const {
  const double length = chunk.length();
  double total = 0.0;
  for (int k = 0; k < users.size(); ++k) {
    double rate = bits[k];
    if (!config_.mcs_table.empty()) {
      const double efficiency = rate / length;
      auto it = std::upper_bound(config_.mcs_table.begin(),
                                 config_.mcs_table.end(), efficiency);
      rate = it == config_.mcs_table.begin() ? 0.0 : *std::prev(it) * length;
    }
    const auto& state = users_[users[k]];
    rate = std::min(rate, state.queue_bits);
    bits[k] = rate;
    total += state.weight * rate;
  }
  return total;
}

PairEvaluation MetricProvider::Evaluate(const UserSet& users,
                                        const Chunk& chunk) const {
  const int n = users.size();
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "empty user set");
  const int tx = config_.antenna_selection ? channel_.dims().tx_antennas : 1;
  std::vector<int> antennas(n, 0);
  std::vector<double> bits(n, 0.0);
  PairEvaluation best;
  best.weighted_sum = -1.0;
  while (true) {
    ChunkRates(users, antennas, chunk, bits);
    const double value = Finish(users, bits, chunk);
    if (value > best.weighted_sum) {
      best.weighted_sum = value;
      best.user_bits = bits;
      best.antennas = antennas;
    }
    int pos = n - 1;
    while (pos >= 0 && ++antennas[pos] == tx) antennas[pos--] = 0;
    if (pos < 0) break;
  }
  return best;
}

double MetricProvider::Compute(const UserSet& users, const Chunk& chunk) {
  constexpr int kMaxInline = 8;
  const int n = users.size();
  if (n < 1 || n > kMaxInline) return Evaluate(users, chunk).weighted_sum;
  // Same search as Evaluate without heap traffic.
  const int tx = config_.antenna_selection ? channel_.dims().tx_antennas : 1;
  std::array<int, kMaxInline> antennas{};
  std::array<double, kMaxInline> bits{};
  double best = -1.0;
  while (true) {
    const std::span<double> span(bits.data(), n);
    ChunkRates(users, std::span<const int>(antennas.data(), n), chunk, span);
    best = std::max(best, Finish(users, span, chunk));
    int pos = n - 1;
    while (pos >= 0 && ++antennas[pos] == tx) antennas[pos--] = 0;
    if (pos < 0) break;
  }
  return best;
}

double MetricProvider::RateSuAt(int user, int antenna, int rb,
                                double psd) const {
  return RateSu(users_[user].weight, channel_.gain(user, antenna, rb), psd);
}

double MetricProvider::RateMmseAt(int u, int v, int antenna_u, int antenna_v,
                                  int rb, double psd_u, double psd_v) const {
  return RateMmsePair(users_[u].weight, users_[v].weight,
                      channel_.gain(u, antenna_u, rb),
                      channel_.gain(v, antenna_v, rb), psd_u, psd_v);
}

double MetricProvider::RateSicAt(int u, int v, int antenna_u, int antenna_v,
                                 int rb, double psd_u, double psd_v) const {
  return RateSicPair(users_[u].weight, users_[v].weight,
                     channel_.gain(u, antenna_u, rb),
                     channel_.gain(v, antenna_v, rb), psd_u, psd_v, u < v);
}

}  // namespace ulms
