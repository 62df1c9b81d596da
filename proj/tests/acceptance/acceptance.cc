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

// Acceptance checks. Each criterion prints one PASS or FAIL line and sets
// the exit status; criteria 5 to 8 read the cached simulation workload.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "test_support.h"
#include "ulms/control.h"
#include "ulms/instance_io.h"
#include "ulms/lrt.h"
#include "ulms/metrics.h"
#include "ulms/oracle.h"
#include "ulms/preselect.h"
#include "ulms/random_instance.h"
#include "ulms/sequential.h"
#include "ulms/sim.h"

namespace {

using Json = nlohmann::ordered_json;
using ulms::testing::Exact;
using ulms::testing::MeetsFraction;
using ulms::testing::ToExact;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string Format(const char* fmt, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, fmt, args...);
  return buffer;
}

// ---------------------------------------------------------------- 1 to 3

Outcome Fuzz() {
  Stopwatch clock;
  int bad = 0;
  std::string first;
  for (uint64_t seed = 1; seed <= 1000; ++seed) {
    ulms::RandomInstanceOptions options;  // N <= 20, K <= 10, T = 2, J <= 2, D <= 3
    options.subadditive = seed % 2 == 0;
    ulms::RandomInstance random = ulms::MakeRandomInstance(seed, options);
    const ulms::Instance& instance = *random.instance;
    const ulms::PairPartition partition = ulms::PartitionNarrowWide(instance);
    ulms::SchedulerOptions plain;
    ulms::SchedulerOptions two_phase;
    two_phase.second_phase = true;
    ulms::SchedulerOptions exhaustive = two_phase;
    exhaustive.wide_mode = ulms::WideMode::kExhaustive;
    const ulms::SchedulerReport a = ulms::AlgorithmI(instance, *random.metrics, plain);
    const ulms::SchedulerReport b = ulms::AlgorithmI(instance, *random.metrics, two_phase);
    const ulms::SchedulerReport c = ulms::AlgorithmI(instance, *random.metrics, exhaustive);
    const ulms::SolverReport phase2 =
        ulms::SecondPhase(instance, partition, *random.metrics, a.narrow);
    const ulms::SequentialReport seq =
        ulms::SequentialLrt(instance, partition, *random.metrics);
    for (const ulms::Allocation* allocation :
         {&a.best.allocation, &a.narrow.allocation, &a.wide.allocation, &b.best.allocation,
          &c.best.allocation, &phase2.allocation, &seq.result.allocation}) {
      const ulms::Verdict verdict = ulms::ValidateAllocation(instance, *allocation);
      const bool independent = ulms::testing::FeasibleByDefinition(instance, *allocation);
      if (!verdict.valid() || !independent) {
        ++bad;
        if (first.empty()) first = Format(" first failure seed %llu", (unsigned long long)seed);
      }
    }
  }
  const double elapsed = clock.seconds();
  return {bad == 0 && elapsed < 60.0,
          Format("1000 instances, %d invalid allocations, %.1f s (limit 60 s)%s", bad,
                 elapsed, first.c_str())};
}

// Plain random metrics run every metric up front; sub-additive ones use
// on-demand computation, whose pruning is only sound under sub-additivity.
ulms::SchedulerOptions SolverModeFor(bool subadditive) {
  ulms::SchedulerOptions options;
  options.lrt.on_demand = subadditive;
  return options;
}

ulms::OracleOptions NarrowOnly(const ulms::PairPartition& partition) {
  ulms::OracleOptions options;
  options.candidates = partition.narrow;  // may be empty: nothing admitted
  return options;
}

Outcome TheoremOneBounds() {
  int checked = 0;
  int narrow_bad = 0;
  int full_bad = 0;
  int exhaustive_bad = 0;
  int with_narrow = 0;
  double worst = 1.0;
  for (uint64_t seed = 1; seed <= 500; ++seed) {
    ulms::RandomInstanceOptions options;
    options.max_rbs = 8;
    options.max_users = 5;
    options.subadditive = seed % 2 == 0;
    ulms::RandomInstance random = ulms::MakeRandomInstance(10'000 + seed, options);
    const ulms::Instance& instance = *random.instance;
    const ulms::PairPartition partition = ulms::PartitionNarrowWide(instance);
    ulms::SchedulerOptions greedy = SolverModeFor(options.subadditive);
    ulms::SchedulerOptions exhaustive = greedy;
    exhaustive.wide_mode = ulms::WideMode::kExhaustive;
    const ulms::SchedulerReport g = ulms::AlgorithmI(instance, *random.metrics, greedy);
    const ulms::SchedulerReport e = ulms::AlgorithmI(instance, *random.metrics, exhaustive);
    const double opt = ulms::ExactOptimum(instance, *random.metrics).objective;
    const double opt_narrow =
        ulms::ExactOptimum(instance, *random.metrics, NarrowOnly(partition)).objective;
    const int t = instance.max_coscheduled();
    const int delta = instance.delta();
    const int j = instance.num_generic_rows();
    const bool wide_empty = partition.wide.empty();
    // The narrow module on its own carries the 1/(1+T+D+2J) factor.
    if (!MeetsFraction(g.narrow.objective, opt_narrow, ulms::ApproximationBound(t, delta, j, true))) {
      ++narrow_bad;
    }
    if (!MeetsFraction(g.best.objective, opt, ulms::ApproximationBound(t, delta, j, wide_empty))) {
      ++full_bad;
    }
    if (!MeetsFraction(e.best.objective, opt,
                       ulms::ApproximationBound(t, delta, j, wide_empty, true))) {
      ++exhaustive_bad;
    }
    if (opt > 0) worst = std::min(worst, g.best.objective / opt);
    if (opt_narrow > 0) ++with_narrow;
    ++checked;
  }
  return {narrow_bad + full_bad + exhaustive_bad == 0,
          Format("%d instances (%d with a positive narrow optimum), violations narrow=%d "
                 "full=%d exhaustive=%d, worst full ratio %.3f",
                 checked, with_narrow, narrow_bad, full_bad, exhaustive_bad, worst)};
}

Outcome TheoremTwoBound() {
  int bad = 0;
  int with_narrow = 0;
  double worst = 1.0;
  for (uint64_t seed = 1; seed <= 300; ++seed) {
    ulms::RandomInstanceOptions options;
    options.max_rbs = 8;
    options.max_users = 5;
    options.subadditive = true;  // the bound assumes sub-additive metrics
    ulms::RandomInstance random = ulms::MakeRandomInstance(20'000 + seed, options);
    const ulms::Instance& instance = *random.instance;
    const ulms::PairPartition partition = ulms::PartitionNarrowWide(instance);
    const ulms::SequentialReport seq =
        ulms::SequentialLrt(instance, partition, *random.metrics);
    const double opt_narrow =
        ulms::ExactOptimum(instance, *random.metrics, NarrowOnly(partition)).objective;
    const ulms::Rational bound = ulms::SequentialBound(
        instance.max_coscheduled(), instance.delta(), instance.num_generic_rows());
    if (!MeetsFraction(seq.result.objective, opt_narrow, bound)) ++bad;
    if (opt_narrow > 0) {
      worst = std::min(worst, seq.result.objective / opt_narrow);
      ++with_narrow;
    }
  }
  return {bad == 0, Format("300 instances (%d with a positive narrow optimum), %d violations, "
                           "worst ratio %.3f",
                           with_narrow, bad, worst)};
}

// ---------------------------------------------------------------- 4

Outcome QualityVersusOptimum() {
  Stopwatch clock;
  constexpr int kRbs = 8;
  constexpr int kUsers = 5;
  const double snr = std::pow(10.0, 10.0 / 10.0);
  double one_phase = 0.0;
  double two_phase = 0.0;
  int counted = 0;
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    std::vector<ulms::UserRadioState> users(kUsers);
    for (auto& user : users) user.power = kRbs * snr;
    ulms::MetricConfig config;
    config.receiver = ulms::Receiver::kMmse;
    ulms::MetricProvider metrics(ulms::GenerateChannels({kUsers, 1, kRbs, 4}, seed), users,
                                 config);
    ulms::Instance::Options spec;
    spec.num_rbs = kRbs;
    spec.num_users = kUsers;
    spec.max_coscheduled = 2;
    const ulms::Instance instance(std::move(spec));
    const double plain = ulms::AlgorithmI(instance, metrics).best.objective;
    ulms::SchedulerOptions options;
    options.second_phase = true;
    const double enhanced = ulms::AlgorithmI(instance, metrics, options).best.objective;
    const double opt = ulms::ExactOptimum(instance, metrics).objective;
    if (opt <= 0) continue;
    one_phase += plain / opt;
    two_phase += enhanced / opt;
    ++counted;
  }
  one_phase /= counted;
  two_phase /= counted;
  const double elapsed = clock.seconds();
  return {one_phase >= 0.80 && two_phase >= 0.90 && elapsed < 120.0,
          Format("mean ratio one-phase %.4f (>= 0.80), two-phase %.4f (>= 0.90), %d "
                 "instances, %.1f s (limit 120 s)",
                 one_phase, two_phase, counted, elapsed)};
}

// ---------------------------------------------------------------- 5 to 8

ulms::SimConfig WorkloadConfig() {
  ulms::SimConfig config;
  config.num_rbs = 20;
  config.num_users = 10;
  config.rx_antennas = 4;
  config.max_coscheduled = 2;
  config.snr_db = {5.0, 10.0, 14.0};
  config.drops = 20;
  config.intervals = 200;
  config.solvers = {ulms::SolverKind::kSuLrt, ulms::SolverKind::kMuLrtTwoPhase};
  config.receivers = {ulms::Receiver::kMmse, ulms::Receiver::kSic};
  config.check_on_demand = true;
  return config;
}

int RunWorkload(const std::string& cache) {
  const ulms::SimConfig config = WorkloadConfig();
  Stopwatch clock;
  const ulms::SimResult result = ulms::RunSimulation(config);
  Json out;
  out["elapsed_s"] = clock.seconds();
  out["drops"] = config.drops;
  out["intervals"] = config.intervals;
  out["num_rbs"] = config.num_rbs;
  Json series = Json::array();
  for (const ulms::SeriesStats& s : result.series) {
    series.push_back({{"snr_db", s.snr_db},
                      {"solver", ulms::SolverName(s.solver)},
                      {"receiver", ulms::ReceiverName(s.receiver)},
                      {"mean_se", s.mean_se(config.num_rbs)},
                      {"edge_se", s.edge_se(config.num_rbs)},
                      {"normalized_cost", s.normalized_cost()},
                      {"metric_cost", s.metric_cost},
                      {"full_mode_cost", s.full_mode_cost},
                      {"objective", s.objective},
                      {"phase1_objective", s.phase1_objective},
                      {"phase1_cost", s.phase1_cost},
                      {"phase2_cost", s.phase2_cost},
                      {"on_demand_checks", s.on_demand_checks},
                      {"on_demand_mismatches", s.on_demand_mismatches},
                      {"invalid_allocations", s.invalid_allocations},
                      {"objective_mismatches", s.objective_mismatches},
                      {"max_set_size", s.max_set_size}});
  }
  out["series"] = series;
  std::ofstream file(cache);
  file << out.dump(2) << "\n";
  std::printf("simulation workload: %zu series in %.1f s, written to %s\n",
              result.series.size(), out["elapsed_s"].get<double>(), cache.c_str());
  return file ? 0 : 1;
}

std::optional<Json> LoadWorkload(const std::string& cache, Outcome& failure) {
  std::ifstream in(cache);
  if (!in) {
    failure = {false, "simulation cache " + cache + " missing; run --run-sim-workload"};
    return std::nullopt;
  }
  return Json::parse(in);
}

const Json& Series(const Json& workload, double snr, const std::string& solver,
                   const std::string& receiver) {
  for (const Json& s : workload["series"]) {
    if (s["snr_db"].get<double>() == snr && s["solver"] == solver && s["receiver"] == receiver) {
      return s;
    }
  }
  throw std::runtime_error("series missing from the simulation cache");
}

constexpr const char* kMu = "MU-LRT-2phase";
constexpr const char* kSu = "SU-LRT";

Outcome GainBand(const Json& w) {
  bool ok = w["elapsed_s"].get<double>() < 600.0 && w["drops"].get<int>() >= 20 &&
            w["intervals"].get<int>() >= 200;
  std::string detail;
  for (double snr : {5.0, 10.0, 14.0}) {
    const double ratio = Series(w, snr, kMu, "mmse")["mean_se"].get<double>() /
                         Series(w, snr, kSu, "mmse")["mean_se"].get<double>();
    ok = ok && ratio >= 1.40 && ratio <= 1.90;
    detail += Format("%g dB %.3f; ", snr, ratio);
  }
  return {ok, "MU/SU mean SE (MMSE) in [1.40, 1.90]: " + detail +
                  Format("workload %.1f s (limit 600 s)", w["elapsed_s"].get<double>())};
}

Outcome OnDemandCost(const Json& w) {
  bool ok = true;
  int64_t checks = 0;
  int64_t mismatches = 0;
  double worst_mmse = 0.0;
  double worst_sic = 0.0;
  for (const Json& s : w["series"]) {
    checks += s["on_demand_checks"].get<int64_t>();
    mismatches += s["on_demand_mismatches"].get<int64_t>();
    if (s["solver"] != kMu) continue;
    double& worst = s["receiver"] == "mmse" ? worst_mmse : worst_sic;
    worst = std::max(worst, s["normalized_cost"].get<double>());
  }
  ok = checks > 0 && mismatches == 0 && worst_mmse <= 0.40 && worst_sic <= 0.50;
  return {ok, Format("%lld interval comparisons, %lld mismatches; worst normalized cost "
                     "MMSE %.3f (<= 0.40), SIC %.3f (<= 0.50)",
                     (long long)checks, (long long)mismatches, worst_mmse, worst_sic)};
}

Outcome SecondPhaseOverhead(const Json& w) {
  bool ok = true;
  double worst_overhead = 0.0;
  double worst_gain = 1e9;
  for (const Json& s : w["series"]) {
    if (s["solver"] != kMu) continue;
    const double overhead = s["phase2_cost"].get<double>() / s["phase1_cost"].get<double>();
    const double gain = s["objective"].get<double>() / s["phase1_objective"].get<double>() - 1.0;
    worst_overhead = std::max(worst_overhead, overhead);
    worst_gain = std::min(worst_gain, gain);
  }
  ok = worst_overhead <= 0.10 && worst_gain >= 0.05;
  return {ok, Format("worst extra cost %.2f%% of phase 1 (<= 10%%), worst objective gain "
                     "%.2f%% (>= 5%%)",
                     100 * worst_overhead, 100 * worst_gain)};
}

Outcome SicOverMmse(const Json& w) {
  bool ok = true;
  std::string detail;
  for (double snr : {5.0, 10.0, 14.0}) {
    const double mmse = Series(w, snr, kMu, "mmse")["mean_se"].get<double>();
    const double sic = Series(w, snr, kMu, "sic")["mean_se"].get<double>();
    const double gap = sic / mmse - 1.0;
    ok = ok && gap >= 0.0 && gap <= 0.10;
    detail += Format("%g dB %+.2f%%; ", snr, 100 * gap);
  }
  return {ok, "SIC over MMSE gap in [0, 10%]: " + detail};
}

// ---------------------------------------------------------------- 9, 10

ulms::MetricProvider PreselectProvider(uint64_t seed, int users, int rbs) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> snr_db(0.0, 20.0);
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  std::vector<ulms::UserRadioState> radio(users);
  for (auto& r : radio) {
    r.power = rbs * std::pow(10.0, snr_db(rng) / 10.0);
    r.weight = weight(rng);
  }
  ulms::MetricConfig config;
  config.receiver = ulms::Receiver::kSic;
  return ulms::MetricProvider(ulms::GenerateChannels({users, 1, rbs, 2}, seed), radio, config);
}

// h(A) summed term by term over every unordered user pair {u, v}, u == v
// included, in exact arithmetic.
Exact HByDefinition(const ulms::PreselectTables& t, uint32_t mask) {
  Exact total = 0;
  for (int j = 0; j < t.rbs(); ++j) {
    for (int u = 0; u < t.users(); ++u) {
      for (int v = u; v < t.users(); ++v) {
        const bool in_u = mask >> u & 1;
        const bool in_v = mask >> v & 1;
        if (u == v || in_u != in_v) {
          if (in_u) total += ToExact(t.su(u, j));
          else if (in_v) total += ToExact(t.su(v, j));
        } else if (in_u && in_v) {
          total += ToExact(t.su(t.sic_first(u, v), j)) + ToExact(t.sic_last(u, v, j));
        }
      }
    }
  }
  return total;
}

Outcome Submodularity() {
  constexpr int kUsers = 12;
  int triples = 0;
  int violations = 0;
  int sandwich = 0;
  int sandwich_bad = 0;
  std::mt19937_64 rng(99);
  for (uint64_t draw = 1; draw <= 100; ++draw) {
    const ulms::PreselectTables t =
        ulms::BuildPreselectTables(PreselectProvider(draw, kUsers, 6));
    for (int i = 0; i < 100; ++i) {
      uint32_t b = rng() & ((1u << kUsers) - 1);
      if (b == (1u << kUsers) - 1) b &= ~(1u << (rng() % kUsers));
      const uint32_t a = b & static_cast<uint32_t>(rng());
      std::vector<int> outside;
      for (int u = 0; u < kUsers; ++u) {
        if (!(b >> u & 1)) outside.push_back(u);
      }
      const uint32_t q = 1u << outside[rng() % outside.size()];
      const Exact gain_a = HByDefinition(t, a | q) - HByDefinition(t, a);
      const Exact gain_b = HByDefinition(t, b | q) - HByDefinition(t, b);
      if (gain_a < gain_b || gain_b < 0) ++violations;
      ++triples;
    }
    for (int i = 0; i < 10; ++i) {
      const int u = static_cast<int>(rng() % kUsers);
      int v = static_cast<int>(rng() % (kUsers - 1));
      if (v >= u) ++v;
      const int j = static_cast<int>(rng() % t.rbs());
      const Exact sic = ToExact(t.su(t.sic_first(u, v), j)) + ToExact(t.sic_last(u, v, j));
      const Exact su_u = ToExact(t.su(u, j));
      const Exact su_v = ToExact(t.su(v, j));
      if (sic < std::max(su_u, su_v) || sic > su_u + su_v) ++sandwich_bad;
      ++sandwich;
    }
  }
  return {violations == 0 && sandwich_bad == 0,
          Format("%d triples with %d diminishing-returns violations; %d pairs with %d "
                 "sandwich violations (exact arithmetic)",
                 triples, violations, sandwich, sandwich_bad)};
}

Outcome GreedyHalf() {
  constexpr int kUsers = 12;
  constexpr int kLimit = 4;
  int bad = 0;
  double worst = 1.0;
  for (uint64_t draw = 1; draw <= 100; ++draw) {
    const ulms::PreselectTables t =
        ulms::BuildPreselectTables(PreselectProvider(1000 + draw, kUsers, 6));
    for (ulms::PreselectRule rule : {ulms::PreselectRule::kF, ulms::PreselectRule::kH}) {
      double best = 0.0;
      for (uint32_t mask = 1; mask < (1u << kUsers); ++mask) {
        if (std::popcount(mask) > kLimit) continue;
        std::vector<int> subset;
        for (int u = 0; u < kUsers; ++u) {
          if (mask >> u & 1) subset.push_back(u);
        }
        best = std::max(best, ulms::EvalSetFunction(rule, t, subset));
      }
      const double greedy = ulms::EvalSetFunction(rule, t, ulms::Preselect(rule, kLimit, t));
      if (2 * greedy < best) ++bad;
      if (best > 0) worst = std::min(worst, greedy / best);
    }
  }
  return {bad == 0, Format("200 runs (f and h), %d below one half, worst ratio %.4f", bad, worst)};
}

// ---------------------------------------------------------------- 11

Outcome ControlChannel() {
  constexpr int kUsers = 6;
  constexpr int kCces = 16;
  const std::vector<int> levels{1, 2, 4, 8};
  std::mt19937_64 rng(2026);
  int bad = 0;
  std::string first;
  auto fail = [&](int draw, const std::string& why) {
    if (first.empty()) first = Format(" first: draw %d ", draw) + why;
    ++bad;
  };
  double worst = 1.0;
  for (int draw = 1; draw <= 50; ++draw) {
    ulms::Instance::Options spec;
    spec.num_rbs = 3;
    spec.num_users = kUsers;
    spec.max_coscheduled = 2;
    const ulms::Instance base(std::move(spec));
    ulms::ControlConfig config;
    config.num_cces = kCces;
    config.subframe = draw % 10;
    std::set<int> distinct;
    do {
      config.levels.clear();
      distinct.clear();
      for (int u = 0; u < kUsers; ++u) {
        config.levels.push_back(levels[rng() % levels.size()]);
        distinct.insert(config.levels.back());
      }
    } while (distinct.size() < 2);
    const ulms::ControlExpansion expansion = ulms::ExpandControlInstance(base, config);
    const ulms::Instance& instance = expansion.instance;
    const auto& map = expansion.map;

    // Column sparsity recomputed from the CCE footprint of every set.
    int delta = 0;
    for (const ulms::UserSet& set : instance.user_sets()) {
      int rows = 0;
      for (int v : set.users()) rows += map.pdcch_of[v].level;
      delta = std::max(delta, rows);
    }
    if (delta != instance.delta()) fail(draw, "reported column sparsity differs");

    ulms::RandomMetrics metrics(static_cast<uint64_t>(draw), kUsers, base.num_rbs(), true);
    ulms::VirtualMetrics virtual_metrics(metrics, map.base_of);
    const ulms::SchedulerReport report = ulms::AlgorithmI(instance, virtual_metrics);
    const ulms::Allocation& allocation = report.best.allocation;
    if (!ulms::ValidateAllocation(instance, allocation).valid() ||
        !ulms::testing::FeasibleByDefinition(instance, allocation)) {
      fail(draw, "invalid allocation");
    }

    std::set<int> scheduled;
    for (const ulms::Assignment& a : allocation.pairs) {
      for (int v : a.users.users()) scheduled.insert(map.base_of[v]);
    }
    std::set<int> granted;
    std::vector<int> owner(kCces, -1);
    for (const ulms::ControlGrant& grant : ulms::ControlGrants(allocation, map)) {
      if (!granted.insert(grant.user).second) fail(draw, "user holds two PDCCHs");
      const auto& list = map.candidates[grant.user];
      if (std::find(list.begin(), list.end(), grant.pdcch) == list.end()) {
        fail(draw, "PDCCH outside the candidate list");
      }
      for (int cce = grant.pdcch.first; cce <= grant.pdcch.last(); ++cce) {
        if (owner[cce] != -1) fail(draw, "CCE double-booked");
        owner[cce] = grant.user;
      }
    }
    if (granted != scheduled) fail(draw, "scheduled users and grants differ");

    ulms::OracleOptions oracle;
    oracle.max_users = instance.num_users();
    ulms::VirtualMetrics oracle_metrics(metrics, map.base_of);
    const double opt = ulms::ExactOptimum(instance, oracle_metrics, oracle).objective;
    const ulms::Rational bound = ulms::ApproximationBound(
        instance.max_coscheduled(), instance.delta(), instance.num_generic_rows(),
        report.wide_empty);
    if (!MeetsFraction(report.best.objective, opt, bound)) fail(draw, "below the worst-case bound");
    if (report.best.objective > opt * (1 + 1e-12)) fail(draw, "exceeds the oracle optimum");
    if (opt > 0) worst = std::min(worst, report.best.objective / opt);
  }
  return {bad == 0, Format("50 draws, %d problems, worst ratio to optimum %.3f", bad, worst) + first};
}

// ---------------------------------------------------------------- 12

Outcome GoldenTraces() {
  int mismatched = 0;
  std::string detail;
  for (const auto& [name, solver] : {std::pair<std::string, std::string>{"single_rb", "mu"},
                                     {"two_rb", "mu"},
                                     {"spectral_hole", "mu2"}}) {
    const std::string dir = ULMS_GOLDEN_DIR;
    ulms::LoadedInstance loaded = ulms::LoadInstanceFile(dir + "/" + name + ".json");
    std::ostringstream trace;
    ulms::TraceSink sink(trace);
    ulms::SchedulerOptions options;
    options.second_phase = solver == "mu2";
    options.lrt.trace = &sink;
    ulms::AlgorithmI(*loaded.instance, *loaded.metrics, options);
    std::ifstream expected_file(dir + "/" + name + "." + solver + ".jsonl");
    std::stringstream expected;
    expected << expected_file.rdbuf();
    const bool same = expected_file && expected.str() == trace.str();
    if (!same) ++mismatched;
    detail += name + (same ? " match; " : " MISMATCH; ");
  }
  return {mismatched == 0, detail};
}

Outcome RunCriterion(int criterion, const std::string& cache) {
  switch (criterion) {
    case 1: return Fuzz();
    case 2: return TheoremOneBounds();
    case 3: return TheoremTwoBound();
    case 4: return QualityVersusOptimum();
    case 5:
    case 6:
    case 7:
    case 8: {
      Outcome failure;
      const std::optional<Json> workload = LoadWorkload(cache, failure);
      if (!workload) return failure;
      if (criterion == 5) return GainBand(*workload);
      if (criterion == 6) return OnDemandCost(*workload);
      if (criterion == 7) return SecondPhaseOverhead(*workload);
      return SicOverMmse(*workload);
    }
    case 9: return Submodularity();
    case 10: return GreedyHalf();
    case 11: return ControlChannel();
    case 12: return GoldenTraces();
    default: return {false, "unknown criterion"};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ulms acceptance checks"};
  int criterion = 0;
  bool run_workload = false;
  std::string cache = "acceptance_sim.json";
  app.add_option("--criterion", criterion, "criterion to check (1-12; 0 = all)")
      ->check(CLI::Range(0, 12));
  app.add_flag("--run-sim-workload", run_workload,
               "run the shared simulation workload and write it to --cache");
  app.add_option("--cache", cache, "simulation workload results (JSON)");
  CLI11_PARSE(app, argc, argv);

  if (run_workload) return RunWorkload(cache);

  bool all_pass = true;
  for (int c = 1; c <= 12; ++c) {
    if (criterion != 0 && c != criterion) continue;
    Outcome outcome;
    try {
      outcome = RunCriterion(c, cache);
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d: %s: %s\n", c, outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
