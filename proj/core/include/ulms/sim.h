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

#ifndef ULMS_SIM_H_
#define ULMS_SIM_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulms/metrics.h"
#include "ulms/preselect.h"

namespace ulms {

enum class SolverKind { kSuLrt, kMuLrt, kMuLrtTwoPhase, kSeqLrt, kExhaustiveWide };

const char* SolverName(SolverKind kind);
const char* ReceiverName(Receiver receiver);

// How the configured SNR maps to the power budget P_k (unit noise).
enum class SnrReference {
  kPerRb,     // P_k = SNR: a one-RB grant sees the configured SNR
  kFullBand,  // P_k = N * SNR: a full-band grant sees the configured SNR
};

struct PreselectConfig {
  enum class Mode { kOff, kRule, kKnapsack };
  Mode mode = Mode::kOff;
  PreselectRule rule = PreselectRule::kTopK;
  int k_tilde = 1;
};

struct ControlSimConfig {
  bool enabled = false;
  int num_cces = 16;
  std::vector<int> levels;            // per user; overrides thresholds
  std::vector<double> thresholds_db;  // descending, see AggregationLevelFor
};

struct SimConfig {
  int num_rbs = 20;
  int num_users = 10;
  int rx_antennas = 4;
  int tx_antennas = 1;
  int max_coscheduled = 2;
  std::vector<double> snr_db = {5.0, 10.0, 14.0};
  int drops = 20;
  int intervals = 200;
  uint64_t seed = 1;
  std::vector<SolverKind> solvers = {SolverKind::kSuLrt, SolverKind::kMuLrtTwoPhase};
  std::vector<Receiver> receivers = {Receiver::kMmse};
  bool antenna_selection = false;
  bool mcs = false;
  PreselectConfig preselection;
  ControlSimConfig control;
  // Bits a user may send per interval; infinite means full backlog.
  double queue_bits = std::numeric_limits<double>::infinity();
  std::vector<double> user_power_offsets_db;  // per user, optional
  double pf_horizon = 100.0;
  SnrReference snr_reference = SnrReference::kFullBand;
  bool on_demand = true;
  // Re-run every LRT interval with all metrics computed up front and compare.
  bool check_on_demand = false;
  int threads = 0;  // 0: hardware concurrency
};

// Throws Error(kParse / kInvalidArgument) on bad input.
SimConfig ParseSimConfig(const std::string& text);
SimConfig LoadSimConfig(const std::string& path);

// Exponential smoothing with horizon t_c: avg <- (1 - 1/t_c) avg + rate/t_c
// and weight = 1 / max(avg, eps), eps = 1e-6 times the mean average.
void UpdatePfWeights(std::span<double> averages, std::span<const double> rates,
                     double horizon, std::span<double> weights);

// Totals of one (SNR, receiver, solver) series.
struct SeriesStats {
  double snr_db = 0.0;
  SolverKind solver = SolverKind::kMuLrt;
  Receiver receiver = Receiver::kMmse;
  int64_t intervals = 0;
  double total_bits = 0.0;
  std::vector<double> user_mean_bits;  // per (drop, user), bits per interval
  double metric_cost = 0.0;
  double all_pairs_cost = 0.0;
  double objective = 0.0;          // sum of scheduled objectives
  double phase1_objective = 0.0;   // before the second phase, when it runs
  double phase1_cost = 0.0;
  double phase2_cost = 0.0;
  int64_t on_demand_checks = 0;
  int64_t on_demand_mismatches = 0;
  double full_mode_cost = 0.0;
  int64_t invalid_allocations = 0;
  int64_t objective_mismatches = 0;
  int max_set_size = 0;

  void Merge(const SeriesStats& other);
  double mean_se(int num_rbs) const;  // bits / (intervals * N)
  double edge_se(int num_rbs) const;
  double normalized_cost() const;
};

struct SimResult {
  std::vector<SeriesStats> series;  // ordered by (snr, receiver, solver)
  bool invariants_ok() const;
};

// One drop at one SNR: every (receiver, solver) state sees identical
// channels, redrawn each interval from (seed, drop, interval).
std::vector<SeriesStats> RunDrop(const SimConfig& config, int snr_index, int drop);

SimResult RunSimulation(const SimConfig& config);

// results.csv with '#' convention lines, diagnostics.csv and per-user
// throughput series in `dir`.
void WriteResults(const SimConfig& config, const SimResult& result,
                  const std::string& dir);

// 5th percentile with linear interpolation between order statistics.
double Percentile(std::vector<double> values, double fraction);

}  // namespace ulms

#endif  // ULMS_SIM_H_
