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

#ifndef ULMS_PRESELECT_H_
#define ULMS_PRESELECT_H_

#include <span>
#include <vector>

#include "ulms/metrics.h"
#include "ulms/model.h"

namespace ulms {

enum class PreselectRule {
  kTopK,  // largest single-user sum rates
  kF,     // one user per RB
  kG,     // pairs allowed, MMSE receiver
  kH,     // pairs allowed, SIC receiver, time-sharing metric
};

// Per-RB weighted rates used by the pre-selection rules. Pair entries are
// symmetric in (u, v). The SIC pair rate is stored as the part contributed by
// the user decoded last; the first-decoded user contributes its SU rate.
class PreselectTables {
 public:
  PreselectTables(int users, int rbs);

  int users() const { return users_; }
  int rbs() const { return rbs_; }
  double su(int u, int j) const { return su_[u * rbs_ + j]; }
  double mmse(int u, int v, int j) const { return mmse_[PairIndex(u, v, j)]; }
  double sic(int u, int v, int j) const;
  double sic_last(int u, int v, int j) const { return sic_last_[PairIndex(u, v, j)]; }
  // User decoded first (interference-free) in the SIC pair {u, v}.
  int sic_first(int u, int v) const;

  void set_su(int u, int j, double value) { su_[u * rbs_ + j] = value; }
  void set_mmse(int u, int v, int j, double value);
  void set_sic_last(int u, int v, int j, double value);
  void set_sic_first(int u, int v, int first);

 private:
  size_t PairIndex(int u, int v, int j) const {
    return (static_cast<size_t>(u) * users_ + v) * rbs_ + j;
  }
  int users_;
  int rbs_;
  std::vector<double> su_;
  std::vector<double> mmse_;
  std::vector<double> sic_last_;
  std::vector<int> sic_first_;
};

// Tables at full per-RB power P_k; with several transmit antennas each entry
// takes the best antenna choice.
PreselectTables BuildPreselectTables(const MetricProvider& provider);

// f, g or h of the user subset `subset`. kTopK is not a set function.
double EvalSetFunction(PreselectRule rule, const PreselectTables& tables,
                       std::span<const int> subset);

// At most `limit` users in ascending id order. kTopK ranks users by their
// SU sum rate; the other rules grow the set greedily by marginal gain and
// stop early once no user adds value. Ties go to the lower id.
std::vector<int> Preselect(PreselectRule rule, int limit,
                           const PreselectTables& tables);

// beta(U, c) = |U| / limit: caps the number of scheduled users.
inline GenericRow UserLimitKnapsack(int limit) { return GenericRow::UserLimit(limit); }

}  // namespace ulms

#endif  // ULMS_PRESELECT_H_
