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

#include "ulms/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ulms/error.h"

namespace ulms {

std::vector<Chunk> EnumerateChunks(int num_rbs) {
  if (num_rbs < 1) {
    throw Error(ErrorCode::kEmptyInstance, "instance needs at least one RB");
  }
  std::vector<Chunk> chunks;
  chunks.reserve(static_cast<size_t>(num_rbs) * (num_rbs + 1) / 2);
  for (int tail = 0; tail < num_rbs; ++tail) {
    for (int head = 0; head <= tail; ++head) chunks.push_back({head, tail});
  }
  return chunks;
}

UserSet::UserSet(std::initializer_list<int> users)
    : UserSet(std::vector<int>(users)) {}

UserSet::UserSet(std::vector<int> users) : users_(std::move(users)) {
  std::sort(users_.begin(), users_.end());
  if (std::adjacent_find(users_.begin(), users_.end()) != users_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate user in user set");
  }
  if (!users_.empty() && users_.front() < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative user id");
  }
}

bool UserSet::Contains(int user) const {
  return std::binary_search(users_.begin(), users_.end(), user);
}

bool UserSet::Intersects(const UserSet& other) const {
  auto a = users_.begin();
  auto b = other.users_.begin();
  while (a != users_.end() && b != other.users_.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

bool UserSet::IsSubsetOf(const UserSet& other) const {
  return std::includes(other.users_.begin(), other.users_.end(),
                       users_.begin(), users_.end());
}

UserSet UserSet::With(int user) const {
  std::vector<int> users = users_;
  users.push_back(user);
  return UserSet(std::move(users));
}

std::string UserSet::ToString() const {
  std::ostringstream out;
  out << '{';
  for (size_t i = 0; i < users_.size(); ++i) {
    if (i > 0) out << ',';
    out << users_[i];
  }
  out << '}';
  return out.str();
}

GroupPartition GroupPartition::Singletons(int num_users) {
  GroupPartition partition;
  partition.group_of_.resize(num_users);
  std::iota(partition.group_of_.begin(), partition.group_of_.end(), 0);
  partition.num_groups_ = num_users;
  return partition;
}

GroupPartition GroupPartition::FromGroups(
    int num_users, const std::vector<std::vector<int>>& groups) {
  GroupPartition partition;
  partition.group_of_.assign(num_users, -1);
  int index = 0;
  for (const auto& group : groups) {
    if (group.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty group in partition");
    }
    for (int user : group) {
      if (user < 0 || user >= num_users) {
        throw Error(ErrorCode::kInvalidArgument, "group member out of range");
      }
      if (partition.group_of_[user] != -1) {
        throw Error(ErrorCode::kInvalidArgument, "user listed in two groups");
      }
      partition.group_of_[user] = index;
    }
    ++index;
  }
  if (std::find(partition.group_of_.begin(), partition.group_of_.end(), -1) !=
      partition.group_of_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "groups do not cover every user");
  }
  partition.num_groups_ = index;
  return partition;
}

std::vector<std::vector<int>> GroupPartition::Groups() const {
  std::vector<std::vector<int>> groups(num_groups_);
  for (int user = 0; user < num_users(); ++user) {
    groups[group_of_[user]].push_back(user);
  }
  return groups;
}

namespace {

void ExtendSets(int num_users, int max_size, const GroupPartition& partition,
                std::vector<int>& current, std::vector<char>& group_taken,
                int next, std::vector<UserSet>& out) {
  if (!current.empty()) out.emplace_back(current);
  if (static_cast<int>(current.size()) == max_size) return;
  for (int user = next; user < num_users; ++user) {
    const int group = partition.group_of(user);
    if (group_taken[group]) continue;
    group_taken[group] = 1;
    current.push_back(user);
    ExtendSets(num_users, max_size, partition, current, group_taken, user + 1,
               out);
    current.pop_back();
    group_taken[group] = 0;
  }
}

}  // namespace

std::vector<UserSet> EnumerateUserSets(int num_users, int max_size,
                                       const GroupPartition& partition) {
  std::vector<UserSet> sets;
  std::vector<int> current;
  std::vector<char> group_taken(partition.num_groups(), 0);
  ExtendSets(num_users, max_size, partition, current, group_taken, 0, sets);
  std::stable_sort(sets.begin(), sets.end(),
                   [](const UserSet& a, const UserSet& b) {
                     if (a.size() != b.size()) return a.size() < b.size();
                     return a < b;
                   });
  return sets;
}

double GenericRow::Weight(const UserSet& users, const Chunk& chunk) const {
  return std::visit(
      [&](const auto& row) -> double {
        using T = std::decay_t<decltype(row)>;
        if constexpr (std::is_same_v<T, UserCount>) {
          return static_cast<double>(users.size()) / row.limit;
        } else if constexpr (std::is_same_v<T, Additive>) {
          double total = 0.0;
          for (int user : users.users()) {
            const auto& per_rb = row.weights[user];
            for (int rb = chunk.head; rb <= chunk.tail; ++rb) total += per_rb[rb];
          }
          return total;
        } else if constexpr (std::is_same_v<T, Table>) {
          auto it = row.entries.find(PairKey{users, chunk});
          return it == row.entries.end() ? row.default_weight : it->second;
        } else {
          return row.fn(users, chunk);
        }
      },
      spec_);
}

namespace {

// Every virtual set whose members map onto `base`, one virtual per member.
void ExpandVirtual(const UserSet& base,
                   const std::vector<std::vector<int>>& virtuals_of, size_t at,
                   std::vector<int>& current, std::vector<UserSet>& out) {
  if (at == base.users().size()) {
    out.emplace_back(current);
    return;
  }
  for (int v : virtuals_of[base[static_cast<int>(at)]]) {
    current.push_back(v);
    ExpandVirtual(base, virtuals_of, at + 1, current, out);
    current.pop_back();
  }
}

UserSet MapToBase(const UserSet& users, std::span<const int> base_of) {
  std::vector<int> mapped;
  for (int user : users.users()) mapped.push_back(base_of[user]);
  return UserSet(std::move(mapped));
}

}  // namespace

GenericRow GenericRow::Remapped(
    std::span<const int> base_of,
    const std::vector<std::vector<int>>& virtuals_of) const {
  return std::visit(
      [&](const auto& row) -> GenericRow {
        using T = std::decay_t<decltype(row)>;
        if constexpr (std::is_same_v<T, UserCount>) {
          return GenericRow(row);
        } else if constexpr (std::is_same_v<T, Additive>) {
          Additive mapped;
          for (int base : base_of) mapped.weights.push_back(row.weights[base]);
          return GenericRow(std::move(mapped));
        } else if constexpr (std::is_same_v<T, Table>) {
          Table mapped{row.default_weight, {}};
          for (const auto& [key, weight] : row.entries) {
            std::vector<UserSet> expanded;
            std::vector<int> current;
            ExpandVirtual(key.first, virtuals_of, 0, current, expanded);
            for (auto& users : expanded) {
              mapped.entries.emplace(PairKey{std::move(users), key.second},
                                     weight);
            }
          }
          return GenericRow(std::move(mapped));
        } else {
          std::vector<int> base(base_of.begin(), base_of.end());
          auto fn = row.fn;
          return GenericRow(Callback{
              [fn, base](const UserSet& users, const Chunk& chunk) {
                return fn(MapToBase(users, base), chunk);
              }});
        }
      },
      spec_);
}

std::vector<int> SparseSystem::RowsOf(const UserSet& users) const {
  std::vector<int> rows;
  if (rows_of_user.empty()) return rows;
  for (int user : users.users()) {
    const auto& touched = rows_of_user[user];
    rows.insert(rows.end(), touched.begin(), touched.end());
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

namespace {

bool SortedIntersect(std::span<const int> a, std::span<const int> b) {
  size_t i = 0;
  size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

}  // namespace

Instance::Instance(Options options)
    : num_rbs_(options.num_rbs),
      num_users_(options.num_users),
      max_coscheduled_(options.max_coscheduled),
      partition_(std::move(options.partition)),
      generic_rows_(std::move(options.generic_rows)),
      sparse_(std::move(options.sparse)),
      user_sets_(std::move(options.user_sets)) {
  if (num_rbs_ < 1 || num_users_ < 1) {
    throw Error(ErrorCode::kEmptyInstance, "instance needs N >= 1 and K >= 1");
  }
  if (max_coscheduled_ < 1 || max_coscheduled_ > 4) {
    throw Error(ErrorCode::kInvalidArgument, "T must lie in 1..4");
  }
  if (num_rbs_ > 1000 || num_users_ > 1000) {
    throw Error(ErrorCode::kInvalidArgument, "N and K are limited to 1000");
  }
  if (partition_.num_users() == 0) {
    partition_ = GroupPartition::Singletons(num_users_);
  }
  if (partition_.num_users() != num_users_) {
    throw Error(ErrorCode::kInvalidArgument, "partition size differs from K");
  }
  if (!sparse_.empty() &&
      static_cast<int>(sparse_.rows_of_user.size()) != num_users_) {
    throw Error(ErrorCode::kInvalidArgument,
                "sparse rows must be listed for every user");
  }
  for (const auto& row : generic_rows_) {
    if (const auto* additive = std::get_if<GenericRow::Additive>(&row.spec())) {
      if (static_cast<int>(additive->weights.size()) != num_users_) {
        throw Error(ErrorCode::kInvalidArgument,
                    "additive row must list every user");
      }
      for (const auto& per_rb : additive->weights) {
        if (static_cast<int>(per_rb.size()) != num_rbs_) {
          throw Error(ErrorCode::kInvalidArgument,
                      "additive row must list every RB");
        }
      }
    }
    if (const auto* count = std::get_if<GenericRow::UserCount>(&row.spec())) {
      if (count->limit < 1) {
        throw Error(ErrorCode::kInvalidArgument, "user limit must be >= 1");
      }
    }
  }

  if (user_sets_.empty()) {
    user_sets_ = EnumerateUserSets(num_users_, max_coscheduled_, partition_);
  } else {
    for (const auto& users : user_sets_) {
      if (users.empty() || users.size() > max_coscheduled_) {
        throw Error(ErrorCode::kInvalidArgument, "user set size outside 1..T");
      }
      if (users.users().back() >= num_users_) {
        throw Error(ErrorCode::kInvalidArgument, "user id out of range");
      }
      for (int a = 0; a < users.size(); ++a) {
        for (int b = a + 1; b < users.size(); ++b) {
          if (partition_.group_of(users[a]) == partition_.group_of(users[b])) {
            throw Error(ErrorCode::kInvalidArgument,
                        "user set holds two users of one group");
          }
        }
      }
    }
  }
  // A user-count row makes every set larger than its limit infeasible alone.
  for (const auto& row : generic_rows_) {
    if (const auto* count = std::get_if<GenericRow::UserCount>(&row.spec())) {
      std::erase_if(user_sets_, [&](const UserSet& users) {
        return users.size() > count->limit;
      });
    }
  }
  if (user_sets_.empty()) {
    throw Error(ErrorCode::kEmptyInstance, "no admissible user set");
  }

  chunks_ = EnumerateChunks(num_rbs_);
  for (int s = 0; s < num_sets(); ++s) set_lookup_.emplace(user_sets_[s], s);

  set_groups_.resize(user_sets_.size());
  set_rows_.resize(user_sets_.size());
  for (int s = 0; s < num_sets(); ++s) {
    for (int user : user_sets_[s].users()) {
      set_groups_[s].push_back(partition_.group_of(user));
    }
    std::sort(set_groups_[s].begin(), set_groups_[s].end());
    set_rows_[s] = sparse_.RowsOf(user_sets_[s]);
    delta_ = std::max(delta_, static_cast<int>(set_rows_[s].size()));
  }
  small_masks_ = partition_.num_groups() <= 64 && sparse_.num_rows <= 64;
  if (small_masks_) {
    set_group_bits_.assign(user_sets_.size(), 0);
    set_row_bits_.assign(user_sets_.size(), 0);
    for (int s = 0; s < num_sets(); ++s) {
      for (int g : set_groups_[s]) set_group_bits_[s] |= uint64_t{1} << g;
      for (int r : set_rows_[s]) set_row_bits_[s] |= uint64_t{1} << r;
    }
  }

  if (options.drop_vacuous_rows && !generic_rows_.empty()) {
    std::vector<GenericRow> kept;
    for (auto& row : generic_rows_) {
      double total = 0.0;
      for (PairId pair = 0; pair < num_pairs() && total <= 1.0; ++pair) {
        total += row.Weight(users_of(pair), chunk_of(pair));
      }
      if (total > 1.0) {
        kept.push_back(std::move(row));
      } else {
        ++dropped_vacuous_rows_;
      }
    }
    generic_rows_ = std::move(kept);
  }
}

int Instance::FindSet(const UserSet& users) const {
  auto it = set_lookup_.find(users);
  return it == set_lookup_.end() ? -1 : it->second;
}

bool Instance::Conflicts(PairId a, PairId b) const {
  if (chunk_of(a).Overlaps(chunk_of(b))) return true;
  const int sa = set_index(a);
  const int sb = set_index(b);
  if (small_masks_) {
    return ((set_group_bits_[sa] & set_group_bits_[sb]) |
            (set_row_bits_[sa] & set_row_bits_[sb])) != 0;
  }
  if (SortedIntersect(set_groups_[sa], set_groups_[sb])) return true;
  return SortedIntersect(set_rows_[sa], set_rows_[sb]);
}

PairPartition PartitionNarrowWide(const Instance& instance) {
  PairPartition result;
  const int rows = instance.num_generic_rows();
  result.covers.resize(rows);
  result.max_weight.assign(instance.num_pairs(), 0.0);
  result.covers_of.resize(instance.num_pairs());
  for (PairId pair = 0; pair < instance.num_pairs(); ++pair) {
    double max_weight = 0.0;
    for (int q = 0; q < rows; ++q) {
      const double weight = instance.GenericWeight(q, pair);
      if (!(weight >= 0.0 && weight <= 1.0)) {
        std::ostringstream msg;
        msg << "knapsack weight " << weight << " outside [0,1] for pair "
            << instance.users_of(pair).ToString() << " on ["
            << instance.chunk_of(pair).head << ','
            << instance.chunk_of(pair).tail << "] row " << q;
        throw Error(ErrorCode::kInvalidWeight, msg.str());
      }
      max_weight = std::max(max_weight, weight);
      if (weight > 0.5) {
        result.covers[q].push_back(pair);
        result.covers_of[pair].push_back(q);
      }
    }
    result.max_weight[pair] = max_weight;
    if (max_weight > 0.5) {
      result.wide.push_back(pair);
    } else {
      result.narrow.push_back(pair);
    }
  }
  return result;
}

std::string Verdict::ToString() const {
  if (valid()) return "valid";
  std::ostringstream out;
  for (const auto& violation : violations) out << violation.detail << "; ";
  return out.str();
}

Verdict ValidateAllocation(const Instance& instance,
                           const Allocation& allocation) {
  Verdict verdict;
  auto report = [&](ViolationKind kind, std::string detail) {
    verdict.violations.push_back({kind, std::move(detail)});
  };
  const auto& pairs = allocation.pairs;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& [users, chunk] = pairs[i];
    if (users.empty() || users.users().back() >= instance.num_users() ||
        chunk.head < 0 || chunk.head > chunk.tail ||
        chunk.tail >= instance.num_rbs()) {
      report(ViolationKind::kOutOfRange, "pair " + std::to_string(i) +
                                             " lies outside the instance");
      return verdict;
    }
    if (users.size() > instance.max_coscheduled()) {
      report(ViolationKind::kSetTooLarge,
             "set " + users.ToString() + " exceeds T");
    }
  }
  std::vector<int> user_count(instance.num_users(), 0);
  std::vector<int> group_count(instance.partition().num_groups(), 0);
  for (const auto& [users, chunk] : pairs) {
    for (int user : users.users()) {
      ++user_count[user];
      ++group_count[instance.partition().group_of(user)];
    }
  }
  for (int user = 0; user < instance.num_users(); ++user) {
    if (user_count[user] > 1) {
      report(ViolationKind::kUserReused,
             "user " + std::to_string(user) + " scheduled in several pairs");
    }
  }
  for (int group = 0; group < instance.partition().num_groups(); ++group) {
    if (group_count[group] > 1) {
      report(ViolationKind::kGroupReused,
             "group " + std::to_string(group) + " scheduled more than once");
    }
  }
  for (size_t i = 0; i < pairs.size(); ++i) {
    for (size_t j = i + 1; j < pairs.size(); ++j) {
      if (pairs[i].chunk.Overlaps(pairs[j].chunk)) {
        report(ViolationKind::kChunkOverlap,
               "chunks of pairs " + std::to_string(i) + " and " +
                   std::to_string(j) + " overlap");
      }
    }
  }
  for (int q = 0; q < instance.num_generic_rows(); ++q) {
    double total = 0.0;
    for (const auto& [users, chunk] : pairs) {
      total += instance.generic_rows()[q].Weight(users, chunk);
    }
    if (total > 1.0 + kKnapsackSlack) {
      report(ViolationKind::kGenericKnapsack,
             "generic row " + std::to_string(q) + " sums to " +
                 std::to_string(total));
    }
  }
  if (!instance.sparse().empty()) {
    std::vector<int> row_count(instance.sparse().num_rows, 0);
    for (const auto& [users, chunk] : pairs) {
      for (int row : instance.sparse().RowsOf(users)) ++row_count[row];
    }
    for (int row = 0; row < instance.sparse().num_rows; ++row) {
      if (row_count[row] > 1) {
        report(ViolationKind::kSparseKnapsack,
               "sparse row " + std::to_string(row) + " used " +
                   std::to_string(row_count[row]) + " times");
      }
    }
  }
  return verdict;
}

FeasibilityTracker::FeasibilityTracker(const Instance& instance)
    : instance_(instance),
      group_used_(instance.partition().num_groups(), 0),
      rb_used_(instance.num_rbs(), 0),
      row_used_(instance.sparse().num_rows, 0),
      generic_totals_(instance.num_generic_rows(), 0.0) {}

bool FeasibilityTracker::CanAdd(PairId pair) const {
  const Chunk& chunk = instance_.chunk_of(pair);
  for (int rb = chunk.head; rb <= chunk.tail; ++rb) {
    if (rb_used_[rb]) return false;
  }
  const int set = instance_.set_index(pair);
  for (int group : instance_.groups_of_set(set)) {
    if (group_used_[group]) return false;
  }
  for (int row : instance_.sparse_rows_of_set(set)) {
    if (row_used_[row]) return false;
  }
  for (int q = 0; q < instance_.num_generic_rows(); ++q) {
    if (generic_totals_[q] + instance_.GenericWeight(q, pair) >
        1.0 + kKnapsackSlack) {
      return false;
    }
  }
  return true;
}

void FeasibilityTracker::Add(PairId pair) {
  const Chunk& chunk = instance_.chunk_of(pair);
  for (int rb = chunk.head; rb <= chunk.tail; ++rb) rb_used_[rb] = 1;
  const int set = instance_.set_index(pair);
  for (int group : instance_.groups_of_set(set)) group_used_[group] = 1;
  for (int row : instance_.sparse_rows_of_set(set)) row_used_[row] = 1;
  for (int q = 0; q < instance_.num_generic_rows(); ++q) {
    generic_totals_[q] += instance_.GenericWeight(q, pair);
  }
  pairs_.push_back(pair);
}

namespace {

Rational Reduced(int64_t num, int64_t den) {
  const int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

}  // namespace

Rational ApproximationBound(int max_coscheduled, int delta, int num_generic,
                            bool wide_empty, bool exhaustive_wide) {
  if (max_coscheduled < 1 || delta < 0 || num_generic < 0) {
    throw Error(ErrorCode::kInvalidArgument, "bound needs T>=1, D>=0, J>=0");
  }
  const int64_t base = max_coscheduled + delta;
  if (wide_empty) return Reduced(1, 1 + base + 2 * num_generic);
  if (exhaustive_wide) return Reduced(1, 2 + base + 2 * num_generic);
  return Reduced(1, 1 + base + 3 * num_generic);
}

Rational SequentialBound(int max_coscheduled, int delta, int num_generic) {
  if (max_coscheduled < 1 || delta < 0 || num_generic < 0) {
    throw Error(ErrorCode::kInvalidArgument, "bound needs T>=1, D>=0, J>=0");
  }
  return Reduced(1, static_cast<int64_t>(max_coscheduled) *
                        (2 + delta + 2 * num_generic));
}

}  // namespace ulms
