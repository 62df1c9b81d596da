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

#include "ulms/random_instance.h"

#include <algorithm>
#include <numeric>
#include <random>

namespace ulms {

namespace {

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double ToUnit(uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

}  // namespace

RandomMetrics::RandomMetrics(uint64_t seed, int num_users, int num_rbs,
                             bool subadditive)
    : seed_(seed), num_rbs_(num_rbs), subadditive_(subadditive) {
  std::mt19937_64 rng(SplitMix(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  rates_.resize(static_cast<size_t>(num_users) * num_rbs);
  for (double& rate : rates_) rate = unit(rng);
}

double RandomMetrics::CostOf(const UserSet& users) const { return users.size(); }

double RandomMetrics::Unit(uint64_t salt, const UserSet& users,
                           const Chunk& chunk) const {
  return ToUnit(SplitMix(SplitMix(seed_ ^ salt) ^ PackPairKey(users, chunk)));
}

double RandomMetrics::Single(int user, const Chunk& chunk) const {
  double total = 0.0;
  for (int rb = chunk.head; rb <= chunk.tail; ++rb) {
    total += rates_[static_cast<size_t>(user) * num_rbs_ + rb];
  }
  return total * (0.7 + 0.3 * Unit(1, UserSet{user}, chunk));
}

double RandomMetrics::SetValue(const UserSet& users, const Chunk& chunk) const {
  if (users.size() == 1) return Single(users[0], chunk);
  double sum = 0.0;
  double best = 0.0;
  for (int user : users.users()) {
    const double single = Single(user, chunk);
    sum += single;
    best = std::max(best, single);
  }
  double value = (0.6 + 0.4 * Unit(2, users, chunk)) * sum;
  // Cap by every cover U = U1 u U2 with two proper subsets.
  const int size = users.size();
  const uint32_t full = (1u << size) - 1;
  std::vector<double> part(full, 0.0);
  for (uint32_t mask = 1; mask < full; ++mask) {
    std::vector<int> members;
    for (int i = 0; i < size; ++i) {
      if ((mask >> i) & 1u) members.push_back(users[i]);
    }
    part[mask] = SetValue(UserSet(std::move(members)), chunk);
  }
  for (uint32_t a = 1; a < full; ++a) {
    for (uint32_t b = a; b < full; ++b) {
      if ((a | b) == full) value = std::min(value, part[a] + part[b]);
    }
  }
  return std::max(value, best);
}

double RandomMetrics::Compute(const UserSet& users, const Chunk& chunk) {
  if (subadditive_) return SetValue(users, chunk);
  const double u = Unit(3, users, chunk);
  if (u < 0.2) return 0.0;
  return 10.0 * (u - 0.2) / 0.8;
}

RandomInstance MakeRandomInstance(uint64_t seed,
                                  const RandomInstanceOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Instance::Options spec;
  spec.num_rbs = uniform_int(1, options.max_rbs);
  spec.num_users = uniform_int(1, options.max_users);
  spec.max_coscheduled = options.max_coscheduled;
  const int n = spec.num_rbs;
  const int k = spec.num_users;
  const int t = spec.max_coscheduled;

  // Random groups: mostly singletons with a few merged users.
  const int num_groups = uniform_int(std::max(1, (k + 1) / 2), k);
  std::vector<std::vector<int>> groups(num_groups);
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 0; i < k; ++i) {
    groups[i < num_groups ? i : uniform_int(0, num_groups - 1)].push_back(order[i]);
  }
  spec.partition = GroupPartition::FromGroups(k, groups);

  const int rows = uniform_int(0, options.max_generic_rows);
  for (int q = 0; q < rows; ++q) {
    if (unit(rng) < options.user_count_probability) {
      spec.generic_rows.push_back(GenericRow::UserLimit(uniform_int(1, 2 * t)));
      continue;
    }
    GenericRow::Additive additive;
    const double cap = 1.0 / (static_cast<double>(t) * n);
    const double scale = unit(rng);
    additive.weights.assign(k, std::vector<double>(n, 0.0));
    for (auto& per_user : additive.weights) {
      for (double& w : per_user) w = cap * std::min(1.0, scale * 2.0 * unit(rng));
    }
    spec.generic_rows.push_back(GenericRow(std::move(additive)));
  }

  if (unit(rng) < options.sparse_probability && options.max_delta > 0) {
    const int per_user = std::max(1, options.max_delta / t);
    spec.sparse.num_rows = uniform_int(1, 4);
    spec.sparse.rows_of_user.resize(k);
    for (auto& touched : spec.sparse.rows_of_user) {
      const int count = uniform_int(0, std::min(per_user, spec.sparse.num_rows));
      std::vector<int> all(spec.sparse.num_rows);
      std::iota(all.begin(), all.end(), 0);
      std::shuffle(all.begin(), all.end(), rng);
      touched.assign(all.begin(), all.begin() + count);
      std::sort(touched.begin(), touched.end());
    }
  }

  RandomInstance out;
  out.instance = std::make_unique<Instance>(std::move(spec));
  out.metrics = std::make_unique<RandomMetrics>(SplitMix(seed ^ 0x5eed), k, n,
                                                options.subadditive);
  return out;
}

}  // namespace ulms
