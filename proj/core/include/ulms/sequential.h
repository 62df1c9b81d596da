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

#ifndef ULMS_SEQUENTIAL_H_
#define ULMS_SEQUENTIAL_H_

#include <vector>

#include "ulms/lrt.h"

namespace ulms {

enum class SequentialStage { kFirst, kMiddle, kLast };

// Masked metric rule of one sequential iteration given the accepted
// allocation of the previous one. In the middle stage only growths of a
// previous pair survive; in the last stage every pair survives unless a
// growth rule or the overlap rule zeroes it.
bool SequentialKeeps(SequentialStage stage, const Allocation& previous,
                     const UserSet& users, const Chunk& chunk);

struct SequentialReport {
  SolverReport result;
  // Objective of every iteration that ran, accepted or not.
  std::vector<double> iteration_objectives;
  int accepted_iterations = 0;
};

// T masked runs of AlgorithmIIa over the narrow pairs, stopping at the first
// iteration that fails to strictly improve the objective.
SequentialReport SequentialLrt(const Instance& instance,
                               const PairPartition& partition,
                               PairMetrics& metrics,
                               const LrtOptions& options = {});

}  // namespace ulms

#endif  // ULMS_SEQUENTIAL_H_
