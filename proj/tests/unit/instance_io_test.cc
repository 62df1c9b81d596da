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

#include "ulms/instance_io.h"

#include <gtest/gtest.h>

#include "ulms/error.h"
#include "ulms/lrt.h"
#include "ulms/random_instance.h"

namespace ulms {
namespace {

TEST(InstanceIo, RoundTripPreservesSolverResults) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    RandomInstanceOptions options;
    options.max_rbs = 6;
    options.max_users = 5;
    // On-demand pruning relies on sub-additive bounds; with them the solver
    // result does not depend on what the cache already holds.
    options.subadditive = true;
    RandomInstance random = MakeRandomInstance(seed, options);
    const std::string text = SerializeInstance(*random.instance, *random.metrics);
    LoadedInstance loaded = ParseInstance(text);
    EXPECT_EQ(loaded.instance->num_rbs(), random.instance->num_rbs());
    EXPECT_EQ(loaded.instance->num_users(), random.instance->num_users());
    EXPECT_EQ(loaded.instance->num_sets(), random.instance->num_sets());
    EXPECT_EQ(loaded.instance->delta(), random.instance->delta());
    const SchedulerReport a = AlgorithmI(*random.instance, *random.metrics);
    const SchedulerReport b = AlgorithmI(*loaded.instance, *loaded.metrics);
    EXPECT_EQ(a.best.allocation.pairs, b.best.allocation.pairs);
    EXPECT_DOUBLE_EQ(a.best.objective, b.best.objective);
    EXPECT_EQ(SerializeInstance(*loaded.instance, *loaded.metrics), text);
  }
}

TEST(InstanceIo, ParseErrors) {
  EXPECT_THROW(ParseInstance("not json"), Error);
  EXPECT_THROW(ParseInstance(R"({"format": "other", "version": 1})"), Error);
  EXPECT_THROW(ParseInstance(R"({"format": "ulms-instance", "version": 99})"), Error);
  EXPECT_THROW(ParseInstance(R"({"format": "ulms-instance", "version": 1})"), Error);
}

TEST(InstanceIo, MissingFile) {
  EXPECT_THROW(LoadInstanceFile("/nonexistent/instance.json"), Error);
}

}  // namespace
}  // namespace ulms
