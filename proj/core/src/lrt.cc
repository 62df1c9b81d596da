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

#include "ulms/lrt.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ulms/error.h"

namespace ulms {

namespace {

using Json = nlohmann::ordered_json;

// Rounding headroom added to sub-additive bounds before pruning, so a pair is
// skipped only when it provably cannot beat the running best. A zero bound is
// exact (masked or zero metric) and stays zero.
double PadBound(double bound) {
  return bound <= 0.0 ? bound : bound + 1e-9 * bound + 1e-12;
}

Json UsersJson(const UserSet& users) {
  Json out = Json::array();
  for (int user : users.users()) out.push_back(user + 1);
  return out;
}

Json PairJson(const Instance& instance, PairId pair) {
  Json out;
  out["users"] = UsersJson(instance.users_of(pair));
  out["head"] = instance.chunk_of(pair).head + 1;
  out["tail"] = instance.chunk_of(pair).tail + 1;
  return out;
}

// Stage-1 tie key: (Head, user ids) ascending.
bool KeyLess(const Instance& instance, PairId a, PairId b) {
  const Chunk& ca = instance.chunk_of(a);
  const Chunk& cb = instance.chunk_of(b);
  if (ca.head != cb.head) return ca.head < cb.head;
  if (ca.tail != cb.tail) return ca.tail < cb.tail;
  return instance.users_of(a) < instance.users_of(b);
}

Allocation ToAllocation(const Instance& instance, std::span<const PairId> pairs,
                        PairMetrics& metrics) {
  Allocation allocation;
  for (PairId pair : pairs) {
    allocation.pairs.push_back({instance.users_of(pair), instance.chunk_of(pair)});
  }
  allocation.value = Objective(allocation, metrics);
  return allocation;
}

void FillCounters(SolverReport& report, const MetricCounters& before,
                  const MetricCounters& after) {
  report.metric_cost = after.computed_cost - before.computed_cost;
  report.metrics_computed = after.computed - before.computed;
}

}  // namespace

double Objective(const Allocation& allocation, PairMetrics& metrics) {
  double total = 0.0;
  for (const auto& [users, chunk] : allocation.pairs) {
    total += metrics.Metric(users, chunk);
  }
  return total;
}

SolverReport AlgorithmIIa(const Instance& instance,
                          const PairPartition& partition,
                          std::span<const PairId> candidates,
                          PairMetrics& metrics, const LrtOptions& options) {
  for (PairId pair : candidates) {
    if (pair < 0 || pair >= instance.num_pairs()) {
      throw Error(ErrorCode::kPrecondition, "candidate pair out of range");
    }
    if (partition.max_weight[pair] > 0.5) {
      throw Error(ErrorCode::kPrecondition,
                  "local ratio module requires narrow pairs");
    }
  }
  const MetricCounters before = metrics.counters();
  SolverReport report;

  // Chunk-major pair ids sort the candidates by tail.
  std::vector<PairId> pairs(candidates.begin(), candidates.end());
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  const int count = static_cast<int>(pairs.size());
  const int num_rbs = instance.num_rbs();

  std::vector<int> bucket_begin(num_rbs + 1, count);
  for (int pos = count - 1; pos >= 0; --pos) {
    bucket_begin[instance.chunk_of(pairs[pos]).tail] = pos;
  }
  for (int j = num_rbs - 1; j >= 0; --j) {
    bucket_begin[j] = std::min(bucket_begin[j], bucket_begin[j + 1]);
  }

  std::vector<double> offset(count, 0.0);  // Gamma
  std::vector<double> value(count, 0.0);
  std::vector<double> bound(count, kInfinity);
  std::vector<int> head(count);
  std::vector<int> set(count);
  std::vector<double> weight(count);
  for (int pos = 0; pos < count; ++pos) {
    head[pos] = instance.chunk_of(pairs[pos]).head;
    set[pos] = instance.set_index(pairs[pos]);
    weight[pos] = partition.max_weight[pairs[pos]];
  }
  // Live positions not yet reached, ascending.
  std::vector<int> pending;
  pending.reserve(count);

  if (options.on_demand) {
    for (int pos = 0; pos < count; ++pos) {
      bound[pos] = metrics.UpperBound(instance.users_of(pairs[pos]),
                                      instance.chunk_of(pairs[pos]));
      if (PadBound(bound[pos]) > 0.0) pending.push_back(pos);
    }
  } else {
    for (int pos = 0; pos < count; ++pos) {
      value[pos] = metrics.Metric(instance.users_of(pairs[pos]),
                                  instance.chunk_of(pairs[pos]));
      if (value[pos] > 0.0) pending.push_back(pos);
    }
  }

  std::vector<int> order;
  size_t next = 0;
  for (int j = 0; j < num_rbs; ++j) {
    const int end = bucket_begin[j + 1];
    int64_t computed = 0;
    int64_t skipped = 0;

    order.clear();
    while (next < pending.size() && pending[next] < end) order.push_back(pending[next++]);
    // Smaller sets first so their metrics bound the larger ones.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return instance.users_of(pairs[a]).size() <
             instance.users_of(pairs[b]).size();
    });

    int best = -1;
    double best_residual = -kInfinity;
    auto consider = [&](int pos, double residual) {
      if (best < 0 || residual > best_residual ||
          (residual == best_residual && KeyLess(instance, pairs[pos], pairs[best]))) {
        best = pos;
        best_residual = residual;
      }
    };

    size_t group_begin = 0;
    while (group_begin < order.size()) {
      const int size = instance.users_of(pairs[order[group_begin]]).size();
      size_t group_end = group_begin;
      while (group_end < order.size() &&
             instance.users_of(pairs[order[group_end]]).size() == size) {
        ++group_end;
      }
      if (options.on_demand) {
        for (size_t i = group_begin; i < group_end; ++i) {
          const int pos = order[i];
          bound[pos] = metrics.UpperBound(instance.users_of(pairs[pos]),
                                          instance.chunk_of(pairs[pos]));
        }
        // Most promising first raises the pruning threshold early.
        std::stable_sort(order.begin() + group_begin, order.begin() + group_end,
                         [&](int a, int b) {
                           return bound[a] - offset[a] > bound[b] - offset[b];
                         });
      }
      for (size_t i = group_begin; i < group_end; ++i) {
        const int pos = order[i];
        const PairId pair = pairs[pos];
        double metric;
        if (options.on_demand) {
          if (bound[pos] != kInfinity) {
            const double ceiling = PadBound(bound[pos]) - offset[pos];
            if (ceiling <= 0.0 || ceiling < best_residual ||
                (ceiling == best_residual &&
                 KeyLess(instance, pairs[best], pair))) {
              ++skipped;
              continue;
            }
          }
          metric = metrics.Metric(instance.users_of(pair), instance.chunk_of(pair));
          ++computed;
        } else {
          metric = value[pos];
        }
        consider(pos, metric - offset[pos]);
      }
      group_begin = group_end;
    }
    report.metrics_skipped += skipped;

    Json event;
    if (options.trace) {
      event["event"] = "iteration";
      event["rb"] = j + 1;
      event["evaluated"] = computed;
      event["skipped"] = skipped;
    }

    int64_t conflict_updates = 0;
    int64_t knapsack_updates = 0;
    int64_t dropped = 0;
    if (best >= 0 && best_residual > 0.0) {
      const PairId chosen = pairs[best];
      const double p_hat = best_residual;
      report.stack.push_back({chosen, p_hat});
      // Later tails overlap the chosen chunk exactly when they start at or
      // before its tail.
      const int chosen_tail = instance.chunk_of(chosen).tail;
      const int chosen_set = set[best];
      const bool masks = instance.small_masks();
      const uint64_t chosen_groups = masks ? instance.group_bits(chosen_set) : 0;
      const uint64_t chosen_rows = masks ? instance.row_bits(chosen_set) : 0;
      size_t write = next;
      for (size_t i = next; i < pending.size(); ++i) {
        const int pos = pending[i];
        bool conflict;
        if (head[pos] <= chosen_tail) {
          conflict = true;
        } else if (masks) {
          conflict = ((instance.group_bits(set[pos]) & chosen_groups) |
                      (instance.row_bits(set[pos]) & chosen_rows)) != 0;
        } else {
          conflict = instance.Conflicts(pairs[pos], chosen);
        }
        if (conflict) {
          offset[pos] += p_hat;
          ++conflict_updates;
        } else if (weight[pos] > 0.0) {
          offset[pos] += 2.0 * p_hat * weight[pos];
          ++knapsack_updates;
        }
        // Gamma only grows, so these can never be pushed.
        const double ceiling =
            options.on_demand ? PadBound(bound[pos]) : value[pos];
        if (ceiling - offset[pos] <= 0.0) {
          ++dropped;
          continue;
        }
        pending[write++] = pos;
      }
      pending.resize(write);
      if (options.trace) {
        Json selected = PairJson(instance, chosen);
        selected["residual"] = p_hat;
        event["selected"] = selected;
      }
    } else if (options.trace) {
      event["selected"] = nullptr;
    }
    if (options.trace) {
      event["conflict_updates"] = conflict_updates;
      event["knapsack_updates"] = knapsack_updates;
      event["dropped"] = dropped;
      options.trace->Emit(event.dump());
    }
  }

  FeasibilityTracker tracker(instance);
  for (auto it = report.stack.rbegin(); it != report.stack.rend(); ++it) {
    const bool keep = tracker.CanAdd(it->pair);
    if (keep) tracker.Add(it->pair);
    if (options.trace) {
      Json event;
      event["event"] = "pop";
      Json pair = PairJson(instance, it->pair);
      for (auto& [key, val] : pair.items()) event[key] = val;
      event["residual"] = it->residual;
      event["kept"] = keep;
      options.trace->Emit(event.dump());
    }
  }
  report.allocation = ToAllocation(instance, tracker.pairs(), metrics);
  report.objective = report.allocation.value;
  report.iterations = num_rbs;
  FillCounters(report, before, metrics.counters());
  if (options.trace) {
    Json event;
    event["event"] = "result";
    event["pairs"] = report.allocation.pairs.size();
    event["objective"] = report.objective;
    options.trace->Emit(event.dump());
  }
  return report;
}

SolverReport AlgorithmIIb(const Instance& instance,
                          const PairPartition& partition, PairMetrics& metrics) {
  const MetricCounters before = metrics.counters();
  SolverReport report;
  const auto& wide = partition.wide;
  std::vector<double> value(wide.size());
  std::unordered_map<PairId, int> position;
  for (size_t i = 0; i < wide.size(); ++i) {
    value[i] = metrics.Metric(instance.users_of(wide[i]), instance.chunk_of(wide[i]));
    position.emplace(wide[i], static_cast<int>(i));
  }
  std::vector<char> available(wide.size(), 1);
  FeasibilityTracker tracker(instance);
  while (true) {
    int best = -1;
    for (size_t i = 0; i < wide.size(); ++i) {
      if (!available[i] || value[i] <= 0.0 || !tracker.CanAdd(wide[i])) continue;
      if (best < 0 || value[i] > value[best] ||
          (value[i] == value[best] && KeyLess(instance, wide[i], wide[best]))) {
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    tracker.Add(wide[best]);
    ++report.iterations;
    available[best] = 0;
    for (int q : partition.covers_of[wide[best]]) {
      for (PairId member : partition.covers[q]) available[position.at(member)] = 0;
    }
  }
  report.allocation = ToAllocation(instance, tracker.pairs(), metrics);
  report.objective = report.allocation.value;
  FillCounters(report, before, metrics.counters());
  return report;
}

namespace {

struct WideSearch {
  const Instance& instance;
  const std::vector<PairId>& pairs;
  const std::vector<double>& value;
  int max_depth;
  double best = 0.0;
  std::vector<PairId> best_pairs;
  std::vector<PairId> current;

  void Run(const FeasibilityTracker& tracker, size_t start, double total) {
    if (total > best) {
      best = total;
      best_pairs = current;
    }
    if (static_cast<int>(current.size()) == max_depth) return;
    for (size_t i = start; i < pairs.size(); ++i) {
      if (!tracker.CanAdd(pairs[i])) continue;
      FeasibilityTracker next = tracker;
      next.Add(pairs[i]);
      current.push_back(pairs[i]);
      Run(next, i + 1, total + value[i]);
      current.pop_back();
    }
  }
};

}  // namespace

SolverReport ExhaustiveWide(const Instance& instance,
                            const PairPartition& partition, PairMetrics& metrics,
                            double budget) {
  const int rows = instance.num_generic_rows();
  const double size = static_cast<double>(partition.wide.size());
  if (rows > 0 && std::pow(size, rows) > budget) {
    SolverReport report = AlgorithmIIb(instance, partition, metrics);
    report.fell_back = true;
    return report;
  }
  const MetricCounters before = metrics.counters();
  std::vector<PairId> pairs;
  std::vector<double> value;
  for (PairId pair : partition.wide) {
    const double metric = metrics.Metric(instance.users_of(pair), instance.chunk_of(pair));
    if (metric > 0.0) {
      pairs.push_back(pair);
      value.push_back(metric);
    }
  }
  WideSearch search{instance, pairs, value, rows, 0.0, {}, {}};
  search.Run(FeasibilityTracker(instance), 0, 0.0);
  SolverReport report;
  report.allocation = ToAllocation(instance, search.best_pairs, metrics);
  report.objective = report.allocation.value;
  report.iterations = static_cast<int>(search.best_pairs.size());
  FillCounters(report, before, metrics.counters());
  return report;
}

bool SecondPhaseKeeps(const Allocation& phase1, const UserSet& users,
                      const Chunk& chunk) {
  for (const auto& [scheduled, claimed] : phase1.pairs) {
    if (users == scheduled) {
      if (!chunk.Covers(claimed)) return false;
    } else if (users.Intersects(scheduled) || chunk.Overlaps(claimed)) {
      return false;
    }
  }
  return true;
}

SolverReport SecondPhase(const Instance& instance,
                         const PairPartition& partition, PairMetrics& metrics,
                         const SolverReport& phase1, const LrtOptions& options) {
  const Allocation& first = phase1.allocation;
  MaskedMetrics masked(metrics, [&first](const UserSet& users, const Chunk& chunk) {
    return SecondPhaseKeeps(first, users, chunk);
  });
  SolverReport phase2 =
      AlgorithmIIa(instance, partition, partition.narrow, masked, options);
  phase2.allocation.value = Objective(phase2.allocation, metrics);
  phase2.objective = phase2.allocation.value;
  if (phase2.objective > phase1.objective) return phase2;
  SolverReport kept = phase1;
  kept.metric_cost = phase2.metric_cost;
  kept.metrics_computed = phase2.metrics_computed;
  kept.metrics_skipped = phase2.metrics_skipped;
  return kept;
}

SchedulerReport AlgorithmI(const Instance& instance, PairMetrics& metrics,
                           const SchedulerOptions& options) {
  SchedulerReport result;
  const PairPartition partition = PartitionNarrowWide(instance);
  result.wide_empty = partition.wide.empty();

  result.narrow =
      AlgorithmIIa(instance, partition, partition.narrow, metrics, options.lrt);
  result.phase1_objective = result.narrow.objective;
  result.phase1_cost = result.narrow.metric_cost;
  if (options.second_phase) {
    SolverReport phase2 =
        SecondPhase(instance, partition, metrics, result.narrow, options.lrt);
    result.phase2_cost = phase2.metric_cost;
    phase2.metric_cost += result.phase1_cost;
    result.narrow = std::move(phase2);
  }
  if (!result.wide_empty) {
    result.wide = options.wide_mode == WideMode::kExhaustive
                      ? ExhaustiveWide(instance, partition, metrics,
                                       options.exhaustive_budget)
                      : AlgorithmIIb(instance, partition, metrics);
  }
  result.best =
      result.wide.objective > result.narrow.objective ? result.wide : result.narrow;
  return result;
}

}  // namespace ulms
