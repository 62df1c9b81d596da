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

#include <gtest/gtest.h>

#include "test_support.h"
#include "ulms/random_instance.h"

namespace ulms {
namespace {

using testing::BruteForceOptimum;
using testing::FeasibleByDefinition;
using testing::MeetsFraction;

TEST(SequentialKeeps, FirstRoundIsSingleUser) {
  const Allocation none;
  EXPECT_TRUE(SequentialKeeps(SequentialStage::kFirst, none, UserSet{3}, Chunk{0, 2}));
  EXPECT_FALSE(SequentialKeeps(SequentialStage::kFirst, none, UserSet{1, 3}, Chunk{0, 0}));
}

TEST(SequentialKeeps, LaterRoundsGrowScheduledSets) {
  Allocation previous;
  previous.pairs = {{UserSet{0}, Chunk{0, 1}}, {UserSet{1}, Chunk{3, 3}}};
  // Middle rounds must extend a scheduled set by one user over a superset chunk.
  EXPECT_TRUE(SequentialKeeps(SequentialStage::kMiddle, previous, UserSet{0, 2}, Chunk{0, 1}));
  EXPECT_TRUE(SequentialKeeps(SequentialStage::kMiddle, previous, UserSet{0, 2}, Chunk{0, 2}));
  EXPECT_FALSE(SequentialKeeps(SequentialStage::kMiddle, previous, UserSet{0, 2}, Chunk{1, 1}));
  EXPECT_FALSE(SequentialKeeps(SequentialStage::kMiddle, previous, UserSet{2}, Chunk{2, 2}));
  // Two scheduled singletons may merge when the chunk covers both.
  EXPECT_TRUE(SequentialKeeps(SequentialStage::kMiddle, previous, UserSet{0, 1}, Chunk{0, 3}));
  EXPECT_FALSE(SequentialKeeps(SequentialStage::kMiddle, previous, UserSet{0, 1}, Chunk{0, 2}));
  // The last round also admits newcomers on free RBs only.
  EXPECT_TRUE(SequentialKeeps(SequentialStage::kLast, previous, UserSet{2}, Chunk{2, 2}));
  EXPECT_FALSE(SequentialKeeps(SequentialStage::kLast, previous, UserSet{2}, Chunk{1, 2}));
  EXPECT_TRUE(SequentialKeeps(SequentialStage::kLast, previous, UserSet{1}, Chunk{2, 3}));
  EXPECT_FALSE(SequentialKeeps(SequentialStage::kLast, previous, UserSet{1}, Chunk{2, 2}));
}

TEST(SequentialKeeps, PoachingFromAScheduledPairIsMasked) {
  Allocation previous;
  previous.pairs = {{UserSet{0, 2}, Chunk{0, 1}}};
  for (SequentialStage stage : {SequentialStage::kMiddle, SequentialStage::kLast}) {
    EXPECT_FALSE(SequentialKeeps(stage, previous, UserSet{0, 1}, Chunk{0, 1}));
    EXPECT_FALSE(SequentialKeeps(stage, previous, UserSet{2}, Chunk{0, 3}));
    EXPECT_TRUE(SequentialKeeps(stage, previous, UserSet{0, 1, 2}, Chunk{0, 1}));
  }
}

TEST(SequentialLrt, SingleRoundEqualsSingleUserNarrowModule) {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    RandomInstanceOptions options;
    options.max_coscheduled = 1;
    RandomInstance a = MakeRandomInstance(seed, options);
    RandomInstance b = MakeRandomInstance(seed, options);
    const PairPartition partition = PartitionNarrowWide(*a.instance);
    const SequentialReport seq = SequentialLrt(*a.instance, partition, *a.metrics);
    MaskedMetrics single = SingleUserView(*b.metrics);
    const SolverReport direct =
        AlgorithmIIa(*b.instance, partition, partition.narrow, single);
    EXPECT_EQ(seq.result.allocation.pairs, direct.allocation.pairs);
    EXPECT_EQ(seq.accepted_iterations, 1);
  }
}

TEST(SequentialLrt, AcceptedRoundsStrictlyImprove) {
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    RandomInstanceOptions options;
    options.max_coscheduled = 3;
    options.subadditive = seed % 2 == 0;
    RandomInstance random = MakeRandomInstance(seed, options);
    const PairPartition partition = PartitionNarrowWide(*random.instance);
    const SequentialReport seq = SequentialLrt(*random.instance, partition, *random.metrics);
    ASSERT_GE(seq.accepted_iterations, 1);
    for (int s = 1; s < seq.accepted_iterations; ++s) {
      EXPECT_GT(seq.iteration_objectives[s], seq.iteration_objectives[s - 1]);
    }
    EXPECT_EQ(seq.result.objective, seq.iteration_objectives[seq.accepted_iterations - 1]);
    EXPECT_TRUE(FeasibleByDefinition(*random.instance, seq.result.allocation));
    EXPECT_LE(seq.result.metric_cost, AllPairsCost(*random.instance, *random.metrics));
  }
}

TEST(SequentialLrt, MeetsWorstCaseBoundAgainstNarrowOptimum) {
  for (uint64_t seed = 1; seed <= 150; ++seed) {
    RandomInstanceOptions options;
    options.max_rbs = 5;
    options.max_users = 4;
    RandomInstance random = MakeRandomInstance(seed, options);
    const Instance& instance = *random.instance;
    const PairPartition partition = PartitionNarrowWide(instance);
    std::vector<char> narrow(instance.num_pairs(), 0);
    for (PairId p : partition.narrow) narrow[p] = 1;
    const SequentialReport seq = SequentialLrt(instance, partition, *random.metrics);
    const double opt =
        BruteForceOptimum(instance, *random.metrics,
                          [&narrow](PairId p) { return narrow[p] != 0; })
            .value;
    EXPECT_TRUE(MeetsFraction(seq.result.objective, opt,
                              SequentialBound(instance.max_coscheduled(), instance.delta(),
                                              instance.num_generic_rows())))
        << "seed " << seed;
  }
}

}  // namespace
}  // namespace ulms
