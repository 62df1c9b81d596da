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

// Local-ratio scheduling over the pair space.
//
// AlgorithmIIa runs the stack-based local ratio test over narrow pairs,
// AlgorithmIIb is the greedy module for wide pairs, ExhaustiveWide replaces
// it with exact search, and AlgorithmI keeps the better of the two sides.

#ifndef ULMS_LRT_H_
#define ULMS_LRT_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ulms/model.h"
#include "ulms/pair_metrics.h"

namespace ulms {

struct LrtStackEntry {
  PairId pair = 0;
  double residual = 0.0;  // p' at push time, > 0
};

struct SolverReport {
  Allocation allocation;
  double objective = 0.0;       // bits per frame, sum of p over the allocation
  double metric_cost = 0.0;     // cost units computed during this run
  int64_t metrics_computed = 0;
  int64_t metrics_skipped = 0;  // pruned through sub-additive bounds
  int iterations = 0;
  bool fell_back = false;       // exhaustive search exceeded its budget
  std::vector<LrtStackEntry> stack;
};

// Receives JSON-lines events. RB and user ids are written 1-based.
class TraceSink {
 public:
  explicit TraceSink(std::ostream& out) : out_(out) {}
  void Emit(const std::string& line) { out_ << line << '\n'; }

 private:
  std::ostream& out_;
};

struct LrtOptions {
  // Compute p(U, c) only at iteration Tail(c) and skip it when a sub-additive
  // bound proves it cannot win; false computes every metric up front.
  bool on_demand = true;
  TraceSink* trace = nullptr;
};

// Local ratio test over `candidates`, which must all be narrow under
// `partition` (kPrecondition otherwise). Deterministic: stage-1 ties go to the
// lexicographically smallest (Head, user ids).
SolverReport AlgorithmIIa(const Instance& instance,
                          const PairPartition& partition,
                          std::span<const PairId> candidates,
                          PairMetrics& metrics, const LrtOptions& options = {});

// Greedy over wide pairs; after each pick every cover holding it is retired.
SolverReport AlgorithmIIb(const Instance& instance,
                          const PairPartition& partition, PairMetrics& metrics);

// Exact search over wide allocations (at most J pairs, one per cover). Falls
// back to AlgorithmIIb when |wide|^J exceeds `budget`.
SolverReport ExhaustiveWide(const Instance& instance,
                            const PairPartition& partition, PairMetrics& metrics,
                            double budget = 5e7);

enum class WideMode { kGreedy, kExhaustive };

struct SchedulerOptions {
  WideMode wide_mode = WideMode::kGreedy;
  bool second_phase = false;
  LrtOptions lrt;
  double exhaustive_budget = 5e7;
};

struct SchedulerReport {
  SolverReport best;
  SolverReport narrow;
  SolverReport wide;
  bool wide_empty = true;
  // Narrow phase-1 figures when the second phase ran.
  double phase1_objective = 0.0;
  double phase1_cost = 0.0;
  double phase2_cost = 0.0;
};

// Runs the narrow and wide modules and returns the larger objective (ties go
// to the narrow allocation).
SchedulerReport AlgorithmI(const Instance& instance, PairMetrics& metrics,
                           const SchedulerOptions& options = {});

// Masked metrics for the second pass: pairs poaching a phase-1 user into a
// different set or touching a phase-1 chunk with a different set read 0, and
// a phase-1 set keeps value only on supersets of its chunk.
bool SecondPhaseKeeps(const Allocation& phase1, const UserSet& users,
                      const Chunk& chunk);

// Reruns AlgorithmIIa on the masked metrics and keeps whichever of phase 1
// and phase 2 has the larger true objective.
SolverReport SecondPhase(const Instance& instance,
                         const PairPartition& partition, PairMetrics& metrics,
                         const SolverReport& phase1,
                         const LrtOptions& options = {});

// Sum of p over the allocation, read through `metrics`.
double Objective(const Allocation& allocation, PairMetrics& metrics);

}  // namespace ulms

#endif  // ULMS_LRT_H_
