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

// Domain types for contiguous-chunk multi-user uplink allocation: chunks,
// compatible user sets, generic and column-sparse knapsack rows, and the
// pair space M = U x C that every solver walks.

#ifndef ULMS_MODEL_H_
#define ULMS_MODEL_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ulms {

// Inclusive run of resource blocks [head, tail], 0-based.
struct Chunk {
  int head = 0;
  int tail = 0;

  int length() const { return tail - head + 1; }
  bool Contains(int rb) const { return head <= rb && rb <= tail; }
  bool Overlaps(const Chunk& other) const {
    return (head > other.head ? head : other.head) <=
           (tail < other.tail ? tail : other.tail);
  }
  // True when this chunk contains every RB of `other`.
  bool Covers(const Chunk& other) const {
    return head <= other.head && other.tail <= tail;
  }

  auto operator<=>(const Chunk&) const = default;
};

// Position of `chunk` in the (tail, head) ordering of EnumerateChunks.
inline int ChunkIndex(const Chunk& chunk) {
  return chunk.tail * (chunk.tail + 1) / 2 + chunk.head;
}

// All N(N+1)/2 chunks ordered by (tail, head). Throws kEmptyInstance for N<1.
std::vector<Chunk> EnumerateChunks(int num_rbs);

// Canonical (strictly increasing) set of co-scheduled user ids.
class UserSet {
 public:
  UserSet() = default;
  UserSet(std::initializer_list<int> users);
  explicit UserSet(std::vector<int> users);

  std::span<const int> users() const { return users_; }
  int size() const { return static_cast<int>(users_.size()); }
  bool empty() const { return users_.empty(); }
  int operator[](int i) const { return users_[i]; }

  bool Contains(int user) const;
  bool Intersects(const UserSet& other) const;
  bool IsSubsetOf(const UserSet& other) const;
  UserSet With(int user) const;

  std::string ToString() const;

  auto operator<=>(const UserSet&) const = default;

 private:
  std::vector<int> users_;
};

// Partition {G_1..G_L} of the users into mutually incompatible groups.
class GroupPartition {
 public:
  GroupPartition() = default;
  static GroupPartition Singletons(int num_users);
  // Throws kInvalidArgument unless `groups` exactly partitions 0..K-1.
  static GroupPartition FromGroups(int num_users,
                                   const std::vector<std::vector<int>>& groups);

  int num_users() const { return static_cast<int>(group_of_.size()); }
  int num_groups() const { return num_groups_; }
  int group_of(int user) const { return group_of_[user]; }
  std::vector<std::vector<int>> Groups() const;
  bool IsSingleton() const { return num_groups_ == num_users(); }

 private:
  std::vector<int> group_of_;
  int num_groups_ = 0;
};

// Every non-empty set of at most `max_size` users with at most one member per
// group, ordered by size and then lexicographically.
std::vector<UserSet> EnumerateUserSets(int num_users, int max_size,
                                       const GroupPartition& partition);

using PairKey = std::pair<UserSet, Chunk>;

// One generic knapsack row beta^q(U, c). Weights are evaluated lazily.
class GenericRow {
 public:
  struct UserCount {
    int limit = 1;
  };
  // beta = sum over users in U and RBs in c of weights[user][rb].
  struct Additive {
    std::vector<std::vector<double>> weights;
  };
  struct Table {
    double default_weight = 0.0;
    std::map<PairKey, double> entries;
  };
  struct Callback {
    std::function<double(const UserSet&, const Chunk&)> fn;
  };
  using Spec = std::variant<UserCount, Additive, Table, Callback>;

  explicit GenericRow(Spec spec) : spec_(std::move(spec)) {}

  static GenericRow UserLimit(int limit) { return GenericRow(UserCount{limit}); }

  double Weight(const UserSet& users, const Chunk& chunk) const;
  const Spec& spec() const { return spec_; }

  // Row over virtual users whose weights follow base_of[virtual user].
  // Table rows are expanded over every virtual combination.
  GenericRow Remapped(std::span<const int> base_of,
                      const std::vector<std::vector<int>>& virtuals_of) const;

 private:
  Spec spec_;
};

// Column-sparse binary rows. alpha^q(U, c) = 1 iff some user in U touches q.
struct SparseSystem {
  int num_rows = 0;
  std::vector<std::vector<int>> rows_of_user;

  bool empty() const { return num_rows == 0; }
  std::vector<int> RowsOf(const UserSet& users) const;
};

using PairId = int32_t;

// Problem data of one scheduling interval.
class Instance {
 public:
  struct Options {
    int num_rbs = 1;
    int num_users = 1;
    int max_coscheduled = 1;
    GroupPartition partition;  // defaults to singletons when empty
    std::vector<GenericRow> generic_rows;
    SparseSystem sparse;
    // Explicit family U; when empty it is enumerated from the partition.
    std::vector<UserSet> user_sets;
    bool drop_vacuous_rows = true;
  };

  explicit Instance(Options options);

  int num_rbs() const { return num_rbs_; }
  int num_users() const { return num_users_; }
  int max_coscheduled() const { return max_coscheduled_; }
  const GroupPartition& partition() const { return partition_; }
  const std::vector<GenericRow>& generic_rows() const { return generic_rows_; }
  int num_generic_rows() const { return static_cast<int>(generic_rows_.size()); }
  const SparseSystem& sparse() const { return sparse_; }
  // Column sparsity: max number of sparse rows touched by any pair.
  int delta() const { return delta_; }
  int dropped_vacuous_rows() const { return dropped_vacuous_rows_; }

  const std::vector<UserSet>& user_sets() const { return user_sets_; }
  const std::vector<Chunk>& chunks() const { return chunks_; }
  int num_sets() const { return static_cast<int>(user_sets_.size()); }
  int num_pairs() const { return num_sets() * static_cast<int>(chunks_.size()); }

  // Pairs are laid out chunk-major so all pairs sharing a tail are contiguous.
  PairId pair_id(int set_index, int chunk_index) const {
    return chunk_index * num_sets() + set_index;
  }
  int set_index(PairId pair) const { return pair % num_sets(); }
  int chunk_index(PairId pair) const { return pair / num_sets(); }
  const UserSet& users_of(PairId pair) const { return user_sets_[set_index(pair)]; }
  const Chunk& chunk_of(PairId pair) const { return chunks_[chunk_index(pair)]; }
  // Index of `users` in the family, or -1.
  int FindSet(const UserSet& users) const;

  std::span<const int> groups_of_set(int set_index) const { return set_groups_[set_index]; }
  std::span<const int> sparse_rows_of_set(int set_index) const { return set_rows_[set_index]; }

  double GenericWeight(int row, PairId pair) const {
    return generic_rows_[row].Weight(users_of(pair), chunk_of(pair));
  }

  // Exact group and sparse-row bitmasks of a set; valid when small_masks().
  bool small_masks() const { return small_masks_; }
  uint64_t group_bits(int set_index) const { return set_group_bits_[set_index]; }
  uint64_t row_bits(int set_index) const { return set_row_bits_[set_index]; }
  // Conflict indicator E of the LRT update: shared group, shared RB, or a
  // shared unit-weight sparse row.
  bool Conflicts(PairId a, PairId b) const;

 private:
  int num_rbs_;
  int num_users_;
  int max_coscheduled_;
  GroupPartition partition_;
  std::vector<GenericRow> generic_rows_;
  SparseSystem sparse_;
  std::vector<UserSet> user_sets_;
  std::vector<Chunk> chunks_;
  std::map<UserSet, int> set_lookup_;
  std::vector<std::vector<int>> set_groups_;
  std::vector<std::vector<int>> set_rows_;
  // Exact bitmasks of the above when groups and rows both fit in 64 bits.
  bool small_masks_ = false;
  std::vector<uint64_t> set_group_bits_;
  std::vector<uint64_t> set_row_bits_;
  int delta_ = 0;
  int dropped_vacuous_rows_ = 0;
};

// Narrow/wide split of the pair space plus covers V^(q) of the wide part.
struct PairPartition {
  std::vector<PairId> narrow;
  std::vector<PairId> wide;
  std::vector<std::vector<PairId>> covers;
  // max_q beta^q(pair) for every pair id (0 when J = 0).
  std::vector<double> max_weight;
  // covers_of[pair] lists the rows q with beta^q(pair) > 1/2.
  std::vector<std::vector<int>> covers_of;
};

// Throws kInvalidWeight when any weight lies outside [0, 1].
PairPartition PartitionNarrowWide(const Instance& instance);

struct Assignment {
  UserSet users;
  Chunk chunk;

  auto operator<=>(const Assignment&) const = default;
};

struct Allocation {
  std::vector<Assignment> pairs;
  double value = 0.0;
};

enum class ViolationKind {
  kUserReused,         // (a)
  kGroupReused,        // (b)
  kChunkOverlap,       // (c)
  kSetTooLarge,        // (d)
  kGenericKnapsack,    // (e)
  kSparseKnapsack,     // (f)
  kOutOfRange,
};

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct Verdict {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  std::string ToString() const;
};

// Slack allowed on generic knapsack sums to absorb rounding in the weights.
inline constexpr double kKnapsackSlack = 1e-9;

Verdict ValidateAllocation(const Instance& instance,
                           const Allocation& allocation);

// Running feasibility state used by every constructive solver.
class FeasibilityTracker {
 public:
  explicit FeasibilityTracker(const Instance& instance);

  bool CanAdd(PairId pair) const;
  void Add(PairId pair);
  const std::vector<PairId>& pairs() const { return pairs_; }

 private:
  const Instance& instance_;
  std::vector<char> group_used_;
  std::vector<char> rb_used_;
  std::vector<char> row_used_;
  std::vector<double> generic_totals_;
  std::vector<PairId> pairs_;
};

struct Rational {
  int64_t num = 0;
  int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

// Worst-case factor of the combined scheduler:
// 1/(1+T+D+2J) without wide pairs, else 1/(1+T+D+3J) with the greedy wide
// module or 1/(2+T+D+2J) with exhaustive wide search.
Rational ApproximationBound(int max_coscheduled, int delta, int num_generic,
                            bool wide_empty, bool exhaustive_wide = false);

// Bound of the T-round sequential scheduler over narrow pairs:
// 1/(T(2+D+2J)).
Rational SequentialBound(int max_coscheduled, int delta, int num_generic);

}  // namespace ulms

#endif  // ULMS_MODEL_H_
