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

#include "ulms/control.h"

#include <algorithm>

#include "ulms/error.h"

namespace ulms {

namespace {

int CandidateCount(int level) {
  switch (level) {
    case 1:
    case 2:
      return 6;
    case 4:
    case 8:
      return 2;
    default:
      throw Error(ErrorCode::kInvalidArgument, "aggregation level must be 1, 2, 4 or 8");
  }
}

}  // namespace

std::vector<Pdcch> PdcchCandidates(int user_id, int level, int num_cces,
                                   int subframe) {
  const int count = CandidateCount(level);
  if (num_cces < level) {
    throw Error(ErrorCode::kInvalidArgument, "fewer CCEs than the aggregation level");
  }
  int64_t y = user_id;
  for (int k = 0; k <= subframe; ++k) y = (kPdcchHashA * y) % kPdcchHashD;
  const int slots = num_cces / level;
  std::vector<Pdcch> out;
  for (int m = 0; m < count; ++m) {
    const Pdcch candidate{level * static_cast<int>((y + m) % slots), level};
    if (std::find(out.begin(), out.end(), candidate) == out.end()) {
      out.push_back(candidate);
    }
  }
  return out;
}

int AggregationLevelFor(double sinr_db, std::span<const double> thresholds_db) {
  int level = 1;
  for (double threshold : thresholds_db) {
    if (sinr_db >= threshold) break;
    level = std::min(8, level * 2);
  }
  return level;
}

UserSet ToBaseUsers(const UserSet& virtual_users, std::span<const int> base_of) {
  std::vector<int> users;
  users.reserve(virtual_users.size());
  for (int v : virtual_users.users()) users.push_back(base_of[v]);
  std::sort(users.begin(), users.end());
  return UserSet(std::move(users));
}

ControlExpansion ExpandControlInstance(const Instance& base,
                                       const ControlConfig& config) {
  const int real_users = base.num_users();
  if (!base.partition().IsSingleton()) {
    throw Error(ErrorCode::kPrecondition, "control expansion needs singleton groups");
  }
  if (static_cast<int>(config.levels.size()) != real_users) {
    throw Error(ErrorCode::kInvalidArgument, "one aggregation level per user required");
  }
  if (!config.identifiers.empty() &&
      static_cast<int>(config.identifiers.size()) != real_users) {
    throw Error(ErrorCode::kInvalidArgument, "one identifier per user required");
  }

  VirtualUserMap map;
  map.virtuals_of.resize(real_users);
  std::vector<std::vector<int>> groups(real_users);
  for (int u = 0; u < real_users; ++u) {
    const int id = config.identifiers.empty() ? u + 1 : config.identifiers[u];
    map.candidates.push_back(
        PdcchCandidates(id, config.levels[u], config.num_cces, config.subframe));
    for (const Pdcch& pdcch : map.candidates.back()) {
      const int v = static_cast<int>(map.base_of.size());
      map.base_of.push_back(u);
      map.pdcch_of.push_back(pdcch);
      map.virtuals_of[u].push_back(v);
      groups[u].push_back(v);
    }
  }
  const int virtual_users = static_cast<int>(map.base_of.size());
  GroupPartition partition = GroupPartition::FromGroups(virtual_users, groups);

  std::vector<UserSet> sets;
  for (UserSet& users :
       EnumerateUserSets(virtual_users, base.max_coscheduled(), partition)) {
    if (base.FindSet(ToBaseUsers(users, map.base_of)) < 0) continue;
    bool clash = false;
    for (int a = 0; a < users.size() && !clash; ++a) {
      for (int b = a + 1; b < users.size() && !clash; ++b) {
        clash = map.pdcch_of[users[a]].Overlaps(map.pdcch_of[users[b]]);
      }
    }
    if (!clash) sets.push_back(std::move(users));
  }

  SparseSystem sparse;
  const int base_rows = base.sparse().num_rows;
  sparse.num_rows = base_rows + config.num_cces;
  sparse.rows_of_user.resize(virtual_users);
  for (int v = 0; v < virtual_users; ++v) {
    const int u = map.base_of[v];
    if (u < static_cast<int>(base.sparse().rows_of_user.size())) {
      sparse.rows_of_user[v] = base.sparse().rows_of_user[u];
    }
    for (int cce = map.pdcch_of[v].first; cce <= map.pdcch_of[v].last(); ++cce) {
      sparse.rows_of_user[v].push_back(base_rows + cce);
    }
  }

  Instance::Options options;
  options.num_rbs = base.num_rbs();
  options.num_users = virtual_users;
  options.max_coscheduled = base.max_coscheduled();
  options.partition = std::move(partition);
  for (const GenericRow& row : base.generic_rows()) {
    options.generic_rows.push_back(row.Remapped(map.base_of, map.virtuals_of));
  }
  options.sparse = std::move(sparse);
  options.user_sets = std::move(sets);
  return ControlExpansion{Instance(std::move(options)), std::move(map), base_rows};
}

std::vector<ControlGrant> ControlGrants(const Allocation& allocation,
                                        const VirtualUserMap& map) {
  std::vector<ControlGrant> grants;
  for (const Assignment& assignment : allocation.pairs) {
    for (int v : assignment.users.users()) {
      grants.push_back({map.base_of[v], map.pdcch_of[v]});
    }
  }
  std::sort(grants.begin(), grants.end(),
            [](const ControlGrant& a, const ControlGrant& b) { return a.user < b.user; });
  return grants;
}

}  // namespace ulms
