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

#ifndef ULMS_RANDOM_INSTANCE_H_
#define ULMS_RANDOM_INSTANCE_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "ulms/model.h"
#include "ulms/pair_metrics.h"

namespace ulms {

// Pseudo-random metrics derived from a seed and the pair itself, so any pair
// can be evaluated in any order. Costs follow the MMSE model (|U| per set,
// 1 per single user).
class RandomMetrics : public CachedMetrics {
 public:
  // Plain mode: independent values in [0, 10] per pair, about a fifth of
  // them zero. Sub-additive mode: a single user earns the sum of per-RB rates
  // times a pooling loss in [0.7, 1]; a set earns a factor in [0.6, 1] of its
  // members' sum, never below its best member nor above any split.
  RandomMetrics(uint64_t seed, int num_users, int num_rbs, bool subadditive);
  double CostOf(const UserSet& users) const override;

 protected:
  double Compute(const UserSet& users, const Chunk& chunk) override;

 private:
  double Unit(uint64_t salt, const UserSet& users, const Chunk& chunk) const;
  double Single(int user, const Chunk& chunk) const;
  double SetValue(const UserSet& users, const Chunk& chunk) const;

  uint64_t seed_;
  int num_rbs_;
  bool subadditive_;
  std::vector<double> rates_;  // per (user, RB)
};

struct RandomInstanceOptions {
  int max_rbs = 20;
  int max_users = 10;
  int max_coscheduled = 2;
  int max_generic_rows = 2;
  int max_delta = 3;
  bool subadditive = false;
  double user_count_probability = 0.2;
  double sparse_probability = 0.5;
};

struct RandomInstance {
  std::unique_ptr<Instance> instance;
  std::unique_ptr<RandomMetrics> metrics;
};

// Random groups, additive knapsack rows with per-(user, RB) weights at most
// 1/(T N) so every weight stays within [0, 1], occasional user-count rows,
// and per-user sparse rows keeping the column sparsity within max_delta.
RandomInstance MakeRandomInstance(uint64_t seed, const RandomInstanceOptions& options);

}  // namespace ulms

#endif  // ULMS_RANDOM_INSTANCE_H_
