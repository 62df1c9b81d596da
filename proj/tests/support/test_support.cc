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

#include "test_support.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace ulms::testing {

Exact ToExact(double value) { return Exact(value); }

bool MeetsFraction(double value, double opt, const Rational& bound) {
  return ToExact(value) * Exact(bound.den) >= ToExact(opt) * Exact(bound.num);
}

bool FeasibleByDefinition(const Instance& instance, const Allocation& allocation) {
  std::set<int> users;
  std::set<int> groups;
  std::vector<char> rbs(instance.num_rbs(), 0);
  std::vector<double> generic(instance.num_generic_rows(), 0.0);
  std::vector<int> sparse(instance.sparse().num_rows, 0);
  for (const Assignment& a : allocation.pairs) {
    if (a.users.empty() || a.users.size() > instance.max_coscheduled()) return false;
    if (a.chunk.head < 0 || a.chunk.tail >= instance.num_rbs() ||
        a.chunk.head > a.chunk.tail) {
      return false;
    }
    for (int u : a.users.users()) {
      if (u < 0 || u >= instance.num_users()) return false;
      if (!users.insert(u).second) return false;
      if (!groups.insert(instance.partition().group_of(u)).second) return false;
    }
    for (int j = a.chunk.head; j <= a.chunk.tail; ++j) {
      if (rbs[j]++) return false;
    }
    for (int q = 0; q < instance.num_generic_rows(); ++q) {
      generic[q] += instance.generic_rows()[q].Weight(a.users, a.chunk);
    }
    std::set<int> touched;
    for (int u : a.users.users()) {
      if (u < static_cast<int>(instance.sparse().rows_of_user.size())) {
        for (int q : instance.sparse().rows_of_user[u]) touched.insert(q);
      }
    }
    for (int q : touched) ++sparse[q];
  }
  for (double total : generic) {
    if (total > 1.0 + kKnapsackSlack) return false;
  }
  for (int total : sparse) {
    if (total > 1) return false;
  }
  return true;
}

namespace {

struct Search {
  const Instance& instance;
  PairMetrics& metrics;
  const std::function<bool(PairId)>& admit;
  std::vector<std::vector<std::pair<PairId, double>>> by_head;
  Allocation current;
  double current_value = 0.0;
  BruteForceResult best;

  void Run(int rb) {
    ++best.allocations_visited;
    if (rb >= instance.num_rbs()) {
      if (current_value > best.value && FeasibleByDefinition(instance, current)) {
        best.value = current_value;
        best.allocation = current;
      }
      return;
    }
    Run(rb + 1);
    for (const auto& [pair, value] : by_head[rb]) {
      current.pairs.push_back({instance.users_of(pair), instance.chunk_of(pair)});
      // Prune only on certain infeasibility, never on value.
      if (FeasibleByDefinition(instance, current)) {
        current_value += value;
        Run(instance.chunk_of(pair).tail + 1);
        current_value -= value;
      }
      current.pairs.pop_back();
    }
  }
};

}  // namespace

BruteForceResult BruteForceOptimum(const Instance& instance, PairMetrics& metrics,
                                   const std::function<bool(PairId)>& admit) {
  Search search{instance, metrics, admit, {}, {}, 0.0, {}};
  search.by_head.resize(instance.num_rbs());
  for (PairId pair = 0; pair < instance.num_pairs(); ++pair) {
    if (admit && !admit(pair)) continue;
    const double value = metrics.Metric(instance.users_of(pair), instance.chunk_of(pair));
    if (value > 0.0) search.by_head[instance.chunk_of(pair).head].push_back({pair, value});
  }
  search.Run(0);
  return search.best;
}

std::unique_ptr<TableMetrics> MakeTable(const std::vector<TableEntry>& entries,
                                        double default_value) {
  std::map<PairKey, double> table;
  for (const TableEntry& e : entries) {
    table[{UserSet(e.users), Chunk{e.head, e.tail}}] = e.value;
  }
  return std::make_unique<TableMetrics>(std::move(table), default_value);
}

double SumOf(const Allocation& allocation, PairMetrics& metrics) {
  double total = 0.0;
  for (const Assignment& a : allocation.pairs) total += metrics.Metric(a.users, a.chunk);
  return total;
}

}  // namespace ulms::testing
