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

#include "ulms/oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ulms/error.h"

namespace ulms {

namespace {

struct Candidate {
  PairId pair = 0;
  Chunk chunk;
  double value = 0.0;
  uint64_t groups = 0;            // DP only
  std::span<const int> group_ids;
  std::span<const int> rows;
  std::vector<double> weights;    // generic row weights
};

class Searcher {
 public:
  Searcher(const Instance& instance, std::vector<Candidate> candidates,
           int64_t max_nodes)
      : instance_(instance),
        max_nodes_(max_nodes),
        by_head_(instance.num_rbs()),
        group_used_(instance.partition().num_groups(), 0),
        row_used_(instance.sparse().num_rows, 0),
        totals_(instance.num_generic_rows(), 0.0),
        candidates_(std::move(candidates)) {
    const int n = instance.num_rbs();
    std::vector<double> density(n, 0.0);
    for (size_t i = 0; i < candidates_.size(); ++i) {
      const Candidate& c = candidates_[i];
      by_head_[c.chunk.head].push_back(static_cast<int>(i));
      for (int rb = c.chunk.head; rb <= c.chunk.tail; ++rb) {
        density[rb] = std::max(density[rb], c.value / c.chunk.length());
      }
    }
    for (auto& list : by_head_) {
      std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
        return candidates_[a].value > candidates_[b].value;
      });
    }
    suffix_.assign(n + 1, 0.0);
    for (int rb = n - 1; rb >= 0; --rb) suffix_[rb] = suffix_[rb + 1] + density[rb];
  }

  std::vector<PairId> Run() {
    Visit(0, 0.0);
    return best_pairs_;
  }

 private:
  bool Fits(const Candidate& c) const {
    for (int g : c.group_ids) {
      if (group_used_[g]) return false;
    }
    for (int r : c.rows) {
      if (row_used_[r]) return false;
    }
    for (size_t q = 0; q < totals_.size(); ++q) {
      if (totals_[q] + c.weights[q] > 1.0 + kKnapsackSlack) return false;
    }
    return true;
  }

  void Apply(const Candidate& c, int sign) {
    for (int g : c.group_ids) group_used_[g] = sign > 0;
    for (int r : c.rows) row_used_[r] = sign > 0;
    for (size_t q = 0; q < totals_.size(); ++q) totals_[q] += sign * c.weights[q];
  }

  void Visit(int rb, double total) {
    if (++nodes_ > max_nodes_) {
      throw Error(ErrorCode::kBudgetExceeded, "oracle node budget exceeded");
    }
    if (total > best_) {
      best_ = total;
      best_pairs_ = current_;
    }
    if (rb >= instance_.num_rbs()) return;
    // Relative slack keeps ties from being pruned by rounding in the bound.
    if (total + suffix_[rb] * (1.0 + 1e-12) <= best_) return;
    for (int index : by_head_[rb]) {
      const Candidate& c = candidates_[index];
      if (!Fits(c)) continue;
      Apply(c, +1);
      current_.push_back(c.pair);
      Visit(c.chunk.tail + 1, total + c.value);
      current_.pop_back();
      Apply(c, -1);
    }
    Visit(rb + 1, total);
  }

  const Instance& instance_;
  int64_t max_nodes_;
  int64_t nodes_ = 0;
  std::vector<std::vector<int>> by_head_;
  std::vector<char> group_used_;
  std::vector<char> row_used_;
  std::vector<double> totals_;
  std::vector<double> suffix_;
  std::vector<Candidate> candidates_;
  double best_ = 0.0;
  std::vector<PairId> best_pairs_;
  std::vector<PairId> current_;
};

std::vector<PairId> SolveByDynamicProgram(const Instance& instance,
                                          const std::vector<Candidate>& candidates,
                                          int64_t max_nodes) {
  const int n = instance.num_rbs();
  const int groups = instance.partition().num_groups();
  if (groups > 20) {
    throw Error(ErrorCode::kBudgetExceeded, "too many groups for the dynamic program");
  }
  const size_t masks = size_t{1} << groups;
  if (static_cast<double>(masks) * (n + 1) > static_cast<double>(max_nodes)) {
    throw Error(ErrorCode::kBudgetExceeded, "oracle state budget exceeded");
  }
  std::vector<std::vector<int>> by_head(n);
  for (size_t i = 0; i < candidates.size(); ++i) {
    by_head[candidates[i].chunk.head].push_back(static_cast<int>(i));
  }
  // value[rb][mask]: best total over RBs rb..N-1 with `mask` groups in use.
  std::vector<double> value((n + 1) * masks, 0.0);
  std::vector<int> choice((n + 1) * masks, -1);
  auto at = [masks](int rb, uint64_t mask) { return rb * masks + mask; };
  for (int rb = n - 1; rb >= 0; --rb) {
    for (uint64_t mask = 0; mask < masks; ++mask) {
      double best = value[at(rb + 1, mask)];
      int pick = -1;
      for (int index : by_head[rb]) {
        const Candidate& c = candidates[index];
        if (c.groups & mask) continue;
        const double total = c.value + value[at(c.chunk.tail + 1, mask | c.groups)];
        if (total > best) {
          best = total;
          pick = index;
        }
      }
      value[at(rb, mask)] = best;
      choice[at(rb, mask)] = pick;
    }
  }
  std::vector<PairId> pairs;
  uint64_t mask = 0;
  for (int rb = 0; rb < n;) {
    const int pick = choice[at(rb, mask)];
    if (pick < 0) {
      ++rb;
      continue;
    }
    pairs.push_back(candidates[pick].pair);
    mask |= candidates[pick].groups;
    rb = candidates[pick].chunk.tail + 1;
  }
  return pairs;
}

}  // namespace

SolverReport ExactOptimum(const Instance& instance, PairMetrics& metrics,
                          const OracleOptions& options) {
  if (instance.num_users() > options.max_users ||
      instance.num_rbs() > options.max_rbs ||
      instance.max_coscheduled() > options.max_coscheduled) {
    throw Error(ErrorCode::kBudgetExceeded, "instance exceeds the oracle budget");
  }
  const MetricCounters before = metrics.counters();
  std::vector<PairId> ids;
  if (options.candidates) {
    ids = *options.candidates;
  } else {
    ids.resize(instance.num_pairs());
    std::iota(ids.begin(), ids.end(), 0);
  }
  const bool knapsacks = instance.num_generic_rows() > 0 || !instance.sparse().empty();
  std::vector<Candidate> candidates;
  for (PairId pair : ids) {
    const double value = metrics.Metric(instance.users_of(pair), instance.chunk_of(pair));
    if (!(value > 0.0)) continue;
    Candidate c;
    c.pair = pair;
    c.chunk = instance.chunk_of(pair);
    c.value = value;
    const int set = instance.set_index(pair);
    c.group_ids = instance.groups_of_set(set);
    c.rows = instance.sparse_rows_of_set(set);
    bool alone = true;
    for (int q = 0; q < instance.num_generic_rows(); ++q) {
      c.weights.push_back(instance.GenericWeight(q, pair));
      alone = alone && c.weights.back() <= 1.0 + kKnapsackSlack;
    }
    if (!alone) continue;
    for (int g : c.group_ids) {
      if (g < 64) c.groups |= uint64_t{1} << g;
    }
    candidates.push_back(std::move(c));
  }

  OracleMode mode = options.mode;
  if (mode == OracleMode::kAuto) {
    mode = knapsacks || instance.partition().num_groups() > 20
               ? OracleMode::kSearch
               : OracleMode::kDynamicProgram;
  }
  if (mode == OracleMode::kDynamicProgram && knapsacks) {
    throw Error(ErrorCode::kPrecondition, "dynamic program needs an instance without knapsack rows");
  }
  std::vector<PairId> pairs =
      mode == OracleMode::kDynamicProgram
          ? SolveByDynamicProgram(instance, candidates, options.max_nodes)
          : Searcher(instance, std::move(candidates), options.max_nodes).Run();
  std::sort(pairs.begin(), pairs.end());

  SolverReport report;
  for (PairId pair : pairs) {
    report.allocation.pairs.push_back({instance.users_of(pair), instance.chunk_of(pair)});
  }
  report.allocation.value = Objective(report.allocation, metrics);
  report.objective = report.allocation.value;
  const MetricCounters after = metrics.counters();
  report.metric_cost = after.computed_cost - before.computed_cost;
  report.metrics_computed = after.computed - before.computed;
  return report;
}

}  // namespace ulms
