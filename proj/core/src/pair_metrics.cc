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

#include "ulms/pair_metrics.h"

#include <algorithm>

#include "ulms/error.h"

namespace ulms {

namespace {

uint64_t PackKey(const int* users, int count, const Chunk& chunk) {
  uint64_t key = 0;
  for (int i = 0; i < count; ++i) key = (key << 10) | static_cast<uint64_t>(users[i] + 1);
  key <<= 10 * (4 - count);
  key = (key << 10) | static_cast<uint64_t>(chunk.head);
  key = (key << 10) | static_cast<uint64_t>(chunk.tail);
  return key;
}

}  // namespace

uint64_t PackPairKey(const UserSet& users, const Chunk& chunk) {
  return PackKey(users.users().data(), users.size(), chunk);
}

double CachedMetrics::Metric(const UserSet& users, const Chunk& chunk) {
  const uint64_t key = PackPairKey(users, chunk);
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++counters_.requested;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double value = Compute(users, chunk);
  if (!(value >= 0.0) || value == kInfinity) {
    throw Error(ErrorCode::kInvalidArgument,
                "metric for " + users.ToString() + " is negative or not finite");
  }
  std::lock_guard<std::mutex> lock(mu_);
  const size_t index = static_cast<size_t>(ChunkIndex(chunk));
  if (index >= chunk_touched_.size()) chunk_touched_.resize(index + 1, 0);
  chunk_touched_[index] = 1;
  if (cache_.emplace(key, value).second) {
    ++counters_.computed;
    counters_.computed_cost += CostOf(users);
  }
  return value;
}

std::optional<double> CachedMetrics::CachedLocked(const UserSet& users,
                                                  const Chunk& chunk) const {
  auto it = cache_.find(PackPairKey(users, chunk));
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> CachedMetrics::Cached(const UserSet& users,
                                            const Chunk& chunk) const {
  std::lock_guard<std::mutex> lock(mu_);
  return CachedLocked(users, chunk);
}

double CachedMetrics::SubadditiveUpperBound(const UserSet& users,
                                            const Chunk& chunk) const {
  std::lock_guard<std::mutex> lock(mu_);
  const size_t index = static_cast<size_t>(ChunkIndex(chunk));
  if (index >= chunk_touched_.size() || !chunk_touched_[index]) return kInfinity;
  if (auto exact = CachedLocked(users, chunk)) return *exact;
  const int n = users.size();
  if (n < 2) return kInfinity;
  const unsigned full = (1u << n) - 1;
  // Sub-metrics of every proper subset, looked up once.
  std::optional<double> part[16];
  int members[4];
  for (unsigned mask = 1; mask < full; ++mask) {
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) members[count++] = users[i];
    }
    auto it = cache_.find(PackKey(members, count, chunk));
    if (it != cache_.end()) part[mask] = it->second;
  }
  double best = kInfinity;
  for (unsigned a = 1; a < full; ++a) {
    if (!part[a]) continue;
    for (unsigned b = a; b < full; ++b) {
      if ((a | b) != full || !part[b]) continue;
      best = std::min(best, *part[a] + *part[b]);
    }
  }
  return best;
}

double CachedMetrics::UpperBound(const UserSet& users,
                                 const Chunk& chunk) const {
  return SubadditiveUpperBound(users, chunk);
}

MetricCounters CachedMetrics::counters() const {
  std::lock_guard<std::mutex> lock(mu_);
  return counters_;
}

void CachedMetrics::ClearCache() {
  std::lock_guard<std::mutex> lock(mu_);
  cache_.clear();
  chunk_touched_.clear();
}

TableMetrics::TableMetrics(std::map<PairKey, double> entries,
                           double default_value,
                           std::function<double(const UserSet&)> cost)
    : entries_(std::move(entries)),
      default_value_(default_value),
      cost_(std::move(cost)) {}

double TableMetrics::CostOf(const UserSet& users) const {
  return cost_ ? cost_(users) : 1.0;
}

double TableMetrics::Compute(const UserSet& users, const Chunk& chunk) {
  auto it = entries_.find(PairKey{users, chunk});
  return it == entries_.end() ? default_value_ : it->second;
}

double AllPairsCost(const Instance& instance, const PairMetrics& metrics) {
  double per_chunk = 0.0;
  for (const auto& users : instance.user_sets()) per_chunk += metrics.CostOf(users);
  return per_chunk * static_cast<double>(instance.chunks().size());
}

}  // namespace ulms
