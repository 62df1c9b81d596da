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

// Lazily evaluated pair metrics p(U, c) with cost accounting.

#ifndef ULMS_PAIR_METRICS_H_
#define ULMS_PAIR_METRICS_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ulms/model.h"

namespace ulms {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct MetricCounters {
  double computed_cost = 0.0;  // weighted by the cost model
  int64_t computed = 0;
  int64_t requested = 0;
};

class PairMetrics {
 public:
  virtual ~PairMetrics() = default;

  // p(U, c) >= 0; may trigger (and count) a computation.
  virtual double Metric(const UserSet& users, const Chunk& chunk) = 0;
  // Upper bound on p(U, c) from already computed values only: the value
  // itself when cached, a sub-additive bound, or +inf.
  virtual double UpperBound(const UserSet& users, const Chunk& chunk) const = 0;
  // Cost-model units charged when p(U, .) is computed.
  virtual double CostOf(const UserSet& users) const = 0;
  virtual MetricCounters counters() const = 0;
};

// Packs (U, c) into one key; requires |U| <= 4, ids < 1023, RBs < 1024.
uint64_t PackPairKey(const UserSet& users, const Chunk& chunk);

// Caches computed metrics and derives sub-additive bounds from the cache.
// Thread-safe.
class CachedMetrics : public PairMetrics {
 public:
  double Metric(const UserSet& users, const Chunk& chunk) override;
  double UpperBound(const UserSet& users, const Chunk& chunk) const override;
  MetricCounters counters() const override;

  std::optional<double> Cached(const UserSet& users, const Chunk& chunk) const;
  // min over cached decompositions U = U1 u U2 of p(U1,c) + p(U2,c);
  // p(U,c) itself when cached, +inf when nothing applies.
  double SubadditiveUpperBound(const UserSet& users, const Chunk& chunk) const;
  void ClearCache();

 protected:
  virtual double Compute(const UserSet& users, const Chunk& chunk) = 0;

 private:
  std::optional<double> CachedLocked(const UserSet& users,
                                     const Chunk& chunk) const;

  mutable std::mutex mu_;
  std::unordered_map<uint64_t, double> cache_;
  // Chunks (by ChunkIndex) holding at least one cached metric.
  std::vector<char> chunk_touched_;
  MetricCounters counters_;
};

// Metrics read from an explicit table; missing pairs take the default.
class TableMetrics : public CachedMetrics {
 public:
  TableMetrics(std::map<PairKey, double> entries, double default_value = 0.0,
               std::function<double(const UserSet&)> cost = nullptr);

  double CostOf(const UserSet& users) const override;
  const std::map<PairKey, double>& entries() const { return entries_; }
  double default_value() const { return default_value_; }

 protected:
  double Compute(const UserSet& users, const Chunk& chunk) override;

 private:
  std::map<PairKey, double> entries_;
  double default_value_;
  std::function<double(const UserSet&)> cost_;
};

// Filtering view p~: masked pairs read as 0 and never reach the inner source.
// Bounds of unmasked pairs come from the inner source.
class MaskedMetrics : public PairMetrics {
 public:
  using Keep = std::function<bool(const UserSet&, const Chunk&)>;

  MaskedMetrics(PairMetrics& inner, Keep keep)
      : inner_(inner), keep_(std::move(keep)) {}

  double Metric(const UserSet& users, const Chunk& chunk) override {
    return keep_(users, chunk) ? inner_.Metric(users, chunk) : 0.0;
  }
  double UpperBound(const UserSet& users, const Chunk& chunk) const override {
    return keep_(users, chunk) ? inner_.UpperBound(users, chunk) : 0.0;
  }
  double CostOf(const UserSet& users) const override { return inner_.CostOf(users); }
  MetricCounters counters() const override { return inner_.counters(); }

 private:
  PairMetrics& inner_;
  Keep keep_;
};

// Single-user view: every metric with |U| >= 2 is zero.
inline MaskedMetrics SingleUserView(PairMetrics& inner) {
  return MaskedMetrics(inner, [](const UserSet& users, const Chunk&) {
    return users.size() == 1;
  });
}

// Sum of CostOf over every pair of the instance (the all-pairs cost).
double AllPairsCost(const Instance& instance, const PairMetrics& metrics);

}  // namespace ulms

#endif  // ULMS_PAIR_METRICS_H_
