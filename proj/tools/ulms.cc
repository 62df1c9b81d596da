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

// ulms: simulator and solver front end.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ulms/error.h"
#include "ulms/instance_io.h"
#include "ulms/lrt.h"
#include "ulms/oracle.h"
#include "ulms/random_instance.h"
#include "ulms/sequential.h"
#include "ulms/sim.h"

namespace {

using Json = nlohmann::ordered_json;

Json AllocationJson(const ulms::Allocation& allocation) {
  Json pairs = Json::array();
  for (const auto& [users, chunk] : allocation.pairs) {
    Json ids = Json::array();
    for (int user : users.users()) ids.push_back(user + 1);
    pairs.push_back({{"users", ids}, {"head", chunk.head + 1}, {"tail", chunk.tail + 1}});
  }
  return pairs;
}

int RunCommand(const std::string& config_path, const std::string& out_dir) {
  const ulms::SimConfig config = ulms::LoadSimConfig(config_path);
  const ulms::SimResult result = ulms::RunSimulation(config);
  ulms::WriteResults(config, result, out_dir);
  std::printf("%-8s %-14s %-5s %10s %10s %10s\n", "snr_db", "solver", "rx", "mean_se",
              "edge_se", "norm_cost");
  for (const auto& s : result.series) {
    std::printf("%-8g %-14s %-5s %10.4f %10.4f %10.4f\n", s.snr_db, ulms::SolverName(s.solver),
                ulms::ReceiverName(s.receiver), s.mean_se(config.num_rbs),
                s.edge_se(config.num_rbs), s.normalized_cost());
  }
  if (!result.invariants_ok()) {
    std::fprintf(stderr, "invariant check failed; see diagnostics.csv\n");
    return 1;
  }
  return 0;
}

int SolveCommand(const std::string& path, const std::string& solver,
                 const std::string& trace_path, bool full) {
  ulms::LoadedInstance loaded = ulms::LoadInstanceFile(path);
  const ulms::Instance& instance = *loaded.instance;
  std::ofstream trace_file;
  std::unique_ptr<ulms::TraceSink> sink;
  if (!trace_path.empty()) {
    if (trace_path == "-") {
      sink = std::make_unique<ulms::TraceSink>(std::cout);
    } else {
      trace_file.open(trace_path);
      if (!trace_file) throw ulms::Error(ulms::ErrorCode::kInvalidArgument, "cannot write " + trace_path);
      sink = std::make_unique<ulms::TraceSink>(trace_file);
    }
  }
  ulms::SchedulerOptions options;
  options.lrt.on_demand = !full;
  options.lrt.trace = sink.get();
  options.second_phase = solver == "mu2" || solver == "exhaustive";
  if (solver == "exhaustive") options.wide_mode = ulms::WideMode::kExhaustive;

  ulms::SolverReport report;
  bool wide_empty = true;
  bool fell_back = false;
  if (solver == "seq") {
    const ulms::PairPartition partition = ulms::PartitionNarrowWide(instance);
    report = ulms::SequentialLrt(instance, partition, *loaded.metrics, options.lrt).result;
  } else if (solver == "mu" || solver == "mu2" || solver == "exhaustive") {
    const ulms::SchedulerReport scheduled = ulms::AlgorithmI(instance, *loaded.metrics, options);
    report = scheduled.best;
    wide_empty = scheduled.wide_empty;
    fell_back = scheduled.wide.fell_back;
  } else {
    throw ulms::Error(ulms::ErrorCode::kInvalidArgument, "unknown solver '" + solver + "'");
  }
  const ulms::Verdict verdict = ulms::ValidateAllocation(instance, report.allocation);
  Json out;
  out["solver"] = solver;
  out["objective"] = report.objective;
  out["allocation"] = AllocationJson(report.allocation);
  out["metric_cost"] = loaded.metrics->counters().computed_cost;
  out["all_pairs_cost"] = ulms::AllPairsCost(instance, *loaded.metrics);
  out["wide_empty"] = wide_empty;
  if (fell_back) out["exhaustive_fell_back"] = true;
  out["valid"] = verdict.valid();
  if (!verdict.valid()) out["violations"] = verdict.ToString();
  (trace_path == "-" ? std::cerr : std::cout) << out.dump(2) << "\n";
  return verdict.valid() ? 0 : 1;
}

int OracleCommand(const std::string& path, long long max_nodes) {
  ulms::LoadedInstance loaded = ulms::LoadInstanceFile(path);
  ulms::OracleOptions options;
  options.max_nodes = max_nodes;
  options.max_users = 64;
  options.max_rbs = 32;
  options.max_coscheduled = 4;
  const ulms::SolverReport report = ulms::ExactOptimum(*loaded.instance, *loaded.metrics, options);
  Json out;
  out["objective"] = report.objective;
  out["allocation"] = AllocationJson(report.allocation);
  out["valid"] = ulms::ValidateAllocation(*loaded.instance, report.allocation).valid();
  std::cout << out.dump(2) << "\n";
  return out["valid"].get<bool>() ? 0 : 1;
}

// Random instances checked for feasibility of every solver and, when small
// enough for the exact oracle, for the worst-case ratio guarantees.
int FuzzCommand(int budget, uint64_t seed, const std::string& save_dir) {
  int failures = 0;
  int bound_checks = 0;
  for (int i = 0; i < budget; ++i) {
    const uint64_t instance_seed = seed + static_cast<uint64_t>(i);
    ulms::RandomInstanceOptions options;
    const bool small = i % 2 == 1;
    if (small) {
      options.max_rbs = 6;
      options.max_users = 4;
    }
    ulms::RandomInstance random = ulms::MakeRandomInstance(instance_seed, options);
    const ulms::Instance& instance = *random.instance;
    std::string problem;
    try {
      const ulms::PairPartition partition = ulms::PartitionNarrowWide(instance);
      ulms::SchedulerOptions greedy;
      greedy.second_phase = true;
      const ulms::SchedulerReport report = ulms::AlgorithmI(instance, *random.metrics, greedy);
      ulms::SchedulerOptions exhaustive = greedy;
      exhaustive.wide_mode = ulms::WideMode::kExhaustive;
      const ulms::SchedulerReport exact_wide =
          ulms::AlgorithmI(instance, *random.metrics, exhaustive);
      const ulms::SequentialReport seq =
          ulms::SequentialLrt(instance, partition, *random.metrics);
      for (const ulms::Allocation* allocation :
           {&report.best.allocation, &report.narrow.allocation, &exact_wide.best.allocation,
            &seq.result.allocation}) {
        const ulms::Verdict verdict = ulms::ValidateAllocation(instance, *allocation);
        if (!verdict.valid()) problem = "infeasible allocation: " + verdict.ToString();
      }
      if (small && problem.empty()) {
        ulms::OracleOptions oracle;
        const double opt = ulms::ExactOptimum(instance, *random.metrics, oracle).objective;
        const ulms::Rational bound = ulms::ApproximationBound(
            instance.max_coscheduled(), instance.delta(), instance.num_generic_rows(),
            report.wide_empty);
        ++bound_checks;
        if (report.best.objective * bound.den < opt * bound.num) {
          problem = "approximation bound violated";
        }
      }
    } catch (const ulms::Error& e) {
      problem = e.what();
    }
    if (!problem.empty()) {
      ++failures;
      std::fprintf(stderr, "seed %llu: %s\n", static_cast<unsigned long long>(instance_seed),
                   problem.c_str());
      if (!save_dir.empty()) {
        std::ofstream out(save_dir + "/fuzz_" + std::to_string(instance_seed) + ".json");
        out << ulms::SerializeInstance(instance, *random.metrics);
      }
    }
  }
  std::printf("fuzz: %d instances, %d bound checks, %d failures\n", budget, bound_checks,
              failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTE uplink multi-user scheduler simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  auto* run = app.add_subcommand("run", "Monte-Carlo simulation from a JSON config");
  run->add_option("--config", config_path, "simulation config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory");

  std::string instance_path;
  std::string solver = "mu";
  std::string trace_path;
  bool full = false;
  auto* solve = app.add_subcommand("solve", "Solve one serialized instance");
  solve->add_option("--instance", instance_path, "instance JSON")->required();
  solve->add_option("--solver", solver, "mu | mu2 | seq | exhaustive")
      ->check(CLI::IsMember({"mu", "mu2", "seq", "exhaustive"}));
  solve->add_option("--trace", trace_path, "write the local-ratio trace (JSON lines; '-' = stdout)");
  solve->add_flag("--full", full, "compute every metric up front");

  long long max_nodes = 50'000'000;
  auto* oracle = app.add_subcommand("oracle", "Exact optimum of a small instance");
  oracle->add_option("--instance", instance_path, "instance JSON")->required();
  oracle->add_option("--max-nodes", max_nodes, "search node budget");

  int budget = 100;
  uint64_t seed = 1;
  std::string save_dir;
  auto* fuzz = app.add_subcommand("fuzz", "Random-instance feasibility and bound checks");
  fuzz->add_option("--budget", budget, "number of instances")->required();
  fuzz->add_option("--seed", seed, "first seed");
  fuzz->add_option("--save", save_dir, "directory for failing instances");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return RunCommand(config_path, out_dir);
    if (*solve) return SolveCommand(instance_path, solver, trace_path, full);
    if (*oracle) return OracleCommand(instance_path, max_nodes);
    if (*fuzz) return FuzzCommand(budget, seed, save_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
