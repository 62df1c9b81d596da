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

#ifndef ULMS_ORACLE_H_
#define ULMS_ORACLE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "ulms/lrt.h"

namespace ulms {

enum class OracleMode { kAuto, kDynamicProgram, kSearch };

struct OracleOptions {
  // Instances beyond these sizes are refused with kBudgetExceeded.
  int max_users = 6;
  int max_rbs = 8;
  int max_coscheduled = 2;
  int64_t max_nodes = 50'000'000;
  OracleMode mode = OracleMode::kAuto;
  // Restrict the optimum to these pairs (possibly none); unset means every
  // pair.
  std::optional<std::vector<PairId>> candidates;
};

// Provably optimal allocation of (P1). kAuto uses the dynamic program over
// (next RB, used groups) when there are no knapsack rows and a pruned
// depth-first search otherwise. Never answers heuristically: exceeding any
// budget throws kBudgetExceeded.
SolverReport ExactOptimum(const Instance& instance, PairMetrics& metrics,
                          const OracleOptions& options = {});

}  // namespace ulms

#endif  // ULMS_ORACLE_H_
