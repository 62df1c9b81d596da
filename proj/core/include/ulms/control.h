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

#ifndef ULMS_CONTROL_H_
#define ULMS_CONTROL_H_

#include <span>
#include <utility>
#include <vector>

#include "ulms/model.h"
#include "ulms/pair_metrics.h"

namespace ulms {

// A block of `level` consecutive CCEs starting at `first` (0-based).
struct Pdcch {
  int first = 0;
  int level = 1;
  int last() const { return first + level - 1; }
  bool Overlaps(const Pdcch& other) const {
    return first <= other.last() && other.first <= last();
  }
  bool operator==(const Pdcch&) const = default;
};

// Hash constants of the candidate search: Y <- (A * Y) mod D.
inline constexpr int64_t kPdcchHashA = 39827;
inline constexpr int64_t kPdcchHashD = 65537;

// Decoding candidates of one user. The recurrence starts from Y = user_id and
// is applied subframe + 1 times. Throws kInvalidArgument for a level outside
// {1, 2, 4, 8} or num_cces < level.
std::vector<Pdcch> PdcchCandidates(int user_id, int level, int num_cces,
                                   int subframe = 0);

// Level from a long-term SINR: 1 above the first threshold, doubling for each
// threshold (descending, dB) the SINR falls below, capped at 8.
int AggregationLevelFor(double sinr_db, std::span<const double> thresholds_db);

struct ControlConfig {
  int num_cces = 16;
  std::vector<int> levels;       // per real user
  std::vector<int> identifiers;  // per real user; defaults to id + 1
  int subframe = 0;
};

struct VirtualUserMap {
  std::vector<std::vector<Pdcch>> candidates;  // D_u per real user
  std::vector<int> base_of;                    // virtual -> real user
  std::vector<std::vector<int>> virtuals_of;   // real -> virtual users
  std::vector<Pdcch> pdcch_of;                 // virtual -> its PDCCH
};

struct ControlExpansion {
  Instance instance;
  VirtualUserMap map;
  int base_sparse_rows = 0;  // CCE rows follow the base instance's rows
};

// Replaces every real user by one virtual user per PDCCH candidate. Virtual
// copies of a user form one group, sets with overlapping PDCCHs are left out,
// and one sparse row per CCE is appended. Requires singleton groups.
ControlExpansion ExpandControlInstance(const Instance& base,
                                       const ControlConfig& config);

UserSet ToBaseUsers(const UserSet& virtual_users, std::span<const int> base_of);

// Metrics of virtual sets read through the real users' provider.
class VirtualMetrics : public PairMetrics {
 public:
  VirtualMetrics(PairMetrics& base, std::vector<int> base_of)
      : base_(base), base_of_(std::move(base_of)) {}
  double Metric(const UserSet& users, const Chunk& chunk) override {
    return base_.Metric(ToBaseUsers(users, base_of_), chunk);
  }
  double UpperBound(const UserSet& users, const Chunk& chunk) const override {
    return base_.UpperBound(ToBaseUsers(users, base_of_), chunk);
  }
  double CostOf(const UserSet& users) const override {
    return base_.CostOf(ToBaseUsers(users, base_of_));
  }
  MetricCounters counters() const override { return base_.counters(); }

 private:
  PairMetrics& base_;
  std::vector<int> base_of_;
};

struct ControlGrant {
  int user = 0;  // real user
  Pdcch pdcch;
};

// Grants of an allocation over the expanded instance, ordered by user.
std::vector<ControlGrant> ControlGrants(const Allocation& allocation,
                                        const VirtualUserMap& map);

}  // namespace ulms

#endif  // ULMS_CONTROL_H_
