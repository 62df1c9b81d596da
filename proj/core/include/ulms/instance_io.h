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

#ifndef ULMS_INSTANCE_IO_H_
#define ULMS_INSTANCE_IO_H_

#include <memory>
#include <string>

#include "ulms/metrics.h"
#include "ulms/model.h"
#include "ulms/pair_metrics.h"

namespace ulms {

inline constexpr char kInstanceFormat[] = "ulms-instance";
inline constexpr int kInstanceVersion = 1;

// Parsed instance document. Metrics come either from an explicit
// "metric_table" or from a "channel" block driving the rate engine.
struct LoadedInstance {
  std::unique_ptr<Instance> instance;
  std::unique_ptr<CachedMetrics> metrics;
};

// Instance JSON (user and RB ids 1-based):
//   {"format": "ulms-instance", "version": 1, "N": .., "K": .., "T": ..,
//    "groups": [[1, 2], [3]],                  optional
//    "user_sets": [[1], [1, 3]],               optional
//    "generic_knapsacks": [
//      {"type": "user_count", "limit": 4} |
//      {"type": "additive", "weights": [[w per RB] per user]} |
//      {"type": "table", "default": 0, "entries": [{"users", "head", "tail", "weight"}]}],
//    "sparse_knapsacks": {"rows": R, "rows_of_user": [[1, 2], []]},
//    "metric_table": {"default": 0, "entries": [{"users", "head", "tail", "value"}]} |
//    "channel": {"rx_antennas", "tx_antennas", "seed", "snr_db", "receiver",
//                "antenna_selection", "weights", "queue_bits"}}
// Throws Error(kParse) on malformed documents.
LoadedInstance ParseInstance(const std::string& text);
LoadedInstance LoadInstanceFile(const std::string& path);

// Serializes the instance with every pair metric materialized into a table.
// Callback knapsack rows cannot be written (kInvalidArgument).
std::string SerializeInstance(const Instance& instance, PairMetrics& metrics);

}  // namespace ulms

#endif  // ULMS_INSTANCE_IO_H_
