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

#include "ulms/sequential.h"

namespace ulms {

bool SequentialKeeps(SequentialStage stage, const Allocation& previous,
                     const UserSet& users, const Chunk& chunk) {
  if (stage == SequentialStage::kFirst) return users.size() == 1;
  bool grows = false;
  for (const auto& [scheduled, claimed] : previous.pairs) {
    const bool shares = users.Intersects(scheduled);
    const bool extends =
        scheduled.IsSubsetOf(users) && users.size() <= scheduled.size() + 1;
    // A scheduled user may only reappear together with its whole set plus
    // at most one newcomer.
    if (shares && !extends) return false;
    if (extends) {
      // ... and must keep every RB it already held.
      if (!chunk.Covers(claimed)) return false;
      grows = true;
    }
    if (stage == SequentialStage::kLast && !shares && chunk.Overlaps(claimed)) {
      return false;
    }
  }
  return stage == SequentialStage::kLast || grows;
}

SequentialReport SequentialLrt(const Instance& instance,
                               const PairPartition& partition,
                               PairMetrics& metrics, const LrtOptions& options) {
  const MetricCounters before = metrics.counters();
  const int rounds = instance.max_coscheduled();
  SequentialReport report;
  SolverReport accepted;
  int64_t skipped = 0;
  for (int s = 1; s <= rounds; ++s) {
    const SequentialStage stage = s == 1        ? SequentialStage::kFirst
                                  : s == rounds ? SequentialStage::kLast
                                                : SequentialStage::kMiddle;
    const Allocation previous = accepted.allocation;
    MaskedMetrics masked(metrics, [&](const UserSet& users, const Chunk& chunk) {
      return SequentialKeeps(stage, previous, users, chunk);
    });
    SolverReport tentative =
        AlgorithmIIa(instance, partition, partition.narrow, masked, options);
    skipped += tentative.metrics_skipped;
    tentative.allocation.value = Objective(tentative.allocation, metrics);
    tentative.objective = tentative.allocation.value;
    report.iteration_objectives.push_back(tentative.objective);
    if (s > 1 && !(tentative.objective > accepted.objective)) break;
    accepted = std::move(tentative);
    report.accepted_iterations = s;
  }
  report.result = std::move(accepted);
  const MetricCounters after = metrics.counters();
  report.result.metric_cost = after.computed_cost - before.computed_cost;
  report.result.metrics_computed = after.computed - before.computed;
  report.result.metrics_skipped = skipped;
  return report;
}

}  // namespace ulms
