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

// Independent reference implementations shared by the unit and acceptance
// tests. Nothing here calls the library's own validator or oracle.

#ifndef ULMS_TESTS_TEST_SUPPORT_H_
#define ULMS_TESTS_TEST_SUPPORT_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ulms/model.h"
#include "ulms/pair_metrics.h"

namespace ulms::testing {

using Exact = boost::multiprecision::cpp_rational;

// Every finite double is a dyadic rational, so this conversion is exact.
Exact ToExact(double value);

// value >= bound * opt in exact arithmetic.
bool MeetsFraction(double value, double opt, const Rational& bound);

// Feasibility of (P1) checked directly from the constraint definitions.
bool FeasibleByDefinition(const Instance& instance, const Allocation& allocation);

struct BruteForceResult {
  double value = 0.0;
  Allocation allocation;
  long long allocations_visited = 0;
};

// Exhaustive search over every allocation of pairs with positive metric.
// `admit` (optional) restricts the usable pairs. Intended for N <= 5, K <= 4.
BruteForceResult BruteForceOptimum(
    const Instance& instance, PairMetrics& metrics,
    const std::function<bool(PairId)>& admit = nullptr);

// Table instance helper: entries keyed by (users, head, tail), 0-based.
struct TableEntry {
  std::vector<int> users;
  int head = 0;
  int tail = 0;
  double value = 0.0;
};
std::unique_ptr<TableMetrics> MakeTable(const std::vector<TableEntry>& entries,
                                        double default_value = 0.0);

// Sum of p over the allocation, read without touching counters of interest.
double SumOf(const Allocation& allocation, PairMetrics& metrics);

}  // namespace ulms::testing

#endif  // ULMS_TESTS_TEST_SUPPORT_H_
