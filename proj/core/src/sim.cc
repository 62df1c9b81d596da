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

#include "ulms/sim.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ulms/control.h"
#include "ulms/error.h"
#include "ulms/lrt.h"
#include "ulms/sequential.h"

namespace ulms {

namespace {

using Json = nlohmann::json;

[[noreturn]] void Fail(const std::string& what) { throw Error(ErrorCode::kParse, what); }

SolverKind SolverFromName(const std::string& name) {
  for (SolverKind kind : {SolverKind::kSuLrt, SolverKind::kMuLrt, SolverKind::kMuLrtTwoPhase,
                          SolverKind::kSeqLrt, SolverKind::kExhaustiveWide}) {
    if (name == SolverName(kind)) return kind;
  }
  Fail("unknown solver '" + name + "'");
}

Receiver ReceiverFromName(const std::string& name) {
  if (name == "mmse") return Receiver::kMmse;
  if (name == "sic") return Receiver::kSic;
  Fail("unknown receiver '" + name + "'");
}

uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t IntervalSeed(uint64_t seed, int drop, int interval) {
  return Mix(Mix(Mix(seed) ^ static_cast<uint64_t>(drop)) ^ static_cast<uint64_t>(interval));
}

struct SolveOutcome {
  Allocation allocation;
  double objective = 0.0;
  double cost = 0.0;
  double phase1_objective = 0.0;
  double phase1_cost = 0.0;
  double phase2_cost = 0.0;
};

SolveOutcome Solve(SolverKind kind, const Instance& instance, PairMetrics& metrics,
                   bool on_demand) {
  SolveOutcome out;
  const MetricCounters before = metrics.counters();
  SchedulerOptions options;
  options.lrt.on_demand = on_demand;
  if (kind == SolverKind::kSeqLrt) {
    const PairPartition partition = PartitionNarrowWide(instance);
    SequentialReport report = SequentialLrt(instance, partition, metrics, options.lrt);
    out.allocation = std::move(report.result.allocation);
    out.objective = report.result.objective;
    out.phase1_objective = out.objective;
  } else {
    options.second_phase = kind != SolverKind::kMuLrt;
    if (kind == SolverKind::kExhaustiveWide) options.wide_mode = WideMode::kExhaustive;
    SchedulerReport report;
    if (kind == SolverKind::kSuLrt) {
      MaskedMetrics single = SingleUserView(metrics);
      report = AlgorithmI(instance, single, options);
    } else {
      report = AlgorithmI(instance, metrics, options);
    }
    out.allocation = std::move(report.best.allocation);
    out.objective = report.best.objective;
    out.phase1_objective = std::max(report.phase1_objective, report.wide.objective);
    out.phase1_cost = report.phase1_cost;
    out.phase2_cost = report.phase2_cost;
  }
  out.cost = metrics.counters().computed_cost - before.computed_cost;
  return out;
}

// One receiver/solver combination with its own PF state.
struct SolverState {
  SolverKind kind;
  Receiver receiver;
  std::vector<double> averages;
  std::vector<double> weights;
  std::vector<double> drop_bits;
  SeriesStats stats;
};

}  // namespace

const char* SolverName(SolverKind kind) {
  switch (kind) {
    case SolverKind::kSuLrt:
      return "SU-LRT";
    case SolverKind::kMuLrt:
      return "MU-LRT";
    case SolverKind::kMuLrtTwoPhase:
      return "MU-LRT-2phase";
    case SolverKind::kSeqLrt:
      return "SEQ-LRT";
    case SolverKind::kExhaustiveWide:
      return "EXH-WIDE";
  }
  return "?";
}

const char* ReceiverName(Receiver receiver) {
  return receiver == Receiver::kMmse ? "mmse" : "sic";
}

SimConfig ParseSimConfig(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    Fail(std::string("invalid JSON: ") + e.what());
  }
  SimConfig config;
  try {
    config.num_rbs = doc.value("N", config.num_rbs);
    config.num_users = doc.value("K", config.num_users);
    config.rx_antennas = doc.value("N_r", config.rx_antennas);
    config.tx_antennas = doc.value("N_t", config.tx_antennas);
    config.max_coscheduled = doc.value("T", config.max_coscheduled);
    config.snr_db = doc.value("snr_db", config.snr_db);
    config.drops = doc.value("drops", config.drops);
    config.intervals = doc.value("intervals", config.intervals);
    config.seed = doc.value("seed", config.seed);
    if (doc.contains("solvers")) {
      config.solvers.clear();
      for (const auto& name : doc.at("solvers")) {
        config.solvers.push_back(SolverFromName(name.get<std::string>()));
      }
    }
    if (doc.contains("receivers")) {
      config.receivers.clear();
      for (const auto& name : doc.at("receivers")) {
        config.receivers.push_back(ReceiverFromName(name.get<std::string>()));
      }
    }
    config.antenna_selection = doc.value("antenna_selection", false);
    config.mcs = doc.value("mcs", false);
    if (doc.contains("preselection")) {
      const Json& block = doc.at("preselection");
      const std::string mode = block.value("mode", std::string("off"));
      config.preselection.k_tilde = block.value("k_tilde", config.num_users);
      if (mode == "off") {
        config.preselection.mode = PreselectConfig::Mode::kOff;
      } else if (mode == "knapsack") {
        config.preselection.mode = PreselectConfig::Mode::kKnapsack;
      } else {
        config.preselection.mode = PreselectConfig::Mode::kRule;
        if (mode == "rule1") {
          config.preselection.rule = PreselectRule::kTopK;
        } else if (mode == "rule2") {
          config.preselection.rule = PreselectRule::kF;
        } else if (mode == "rule3") {
          config.preselection.rule = PreselectRule::kG;
        } else if (mode == "rule4") {
          config.preselection.rule = PreselectRule::kH;
        } else {
          Fail("unknown preselection mode '" + mode + "'");
        }
      }
    }
    if (doc.contains("control")) {
      const Json& block = doc.at("control");
      config.control.enabled = block.value("enabled", true);
      config.control.num_cces = block.value("cces", config.control.num_cces);
      config.control.levels = block.value("levels", std::vector<int>{});
      config.control.thresholds_db = block.value("thresholds_db", std::vector<double>{});
    }
    if (doc.contains("buffer")) {
      const Json& block = doc.at("buffer");
      const std::string model = block.value("model", std::string("infinite"));
      if (model == "finite") {
        config.queue_bits = block.at("bits").get<double>();
      } else if (model != "infinite") {
        Fail("buffer model must be 'infinite' or 'finite'");
      }
    }
    config.user_power_offsets_db =
        doc.value("user_power_offsets_db", std::vector<double>{});
    config.pf_horizon = doc.value("pf_horizon", config.pf_horizon);
    const std::string reference = doc.value("snr_reference", std::string("band"));
    if (reference == "rb") {
      config.snr_reference = SnrReference::kPerRb;
    } else if (reference == "band") {
      config.snr_reference = SnrReference::kFullBand;
    } else {
      Fail("snr_reference must be 'rb' or 'band'");
    }
    config.on_demand = doc.value("on_demand", true);
    config.check_on_demand = doc.value("check_on_demand", false);
    config.threads = doc.value("threads", 0);
  } catch (const Json::exception& e) {
    Fail(std::string("malformed config: ") + e.what());
  }
  if (config.num_rbs < 1 || config.num_users < 1 || config.rx_antennas < 1 ||
      config.tx_antennas < 1 || config.max_coscheduled < 1 || config.drops < 1 ||
      config.intervals < 1 || config.snr_db.empty() || config.solvers.empty() ||
      config.receivers.empty() || !(config.pf_horizon >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "config counts must be >= 1 and lists non-empty");
  }
  if (!config.user_power_offsets_db.empty() &&
      static_cast<int>(config.user_power_offsets_db.size()) != config.num_users) {
    throw Error(ErrorCode::kInvalidArgument, "one power offset per user required");
  }
  return config;
}

SimConfig LoadSimConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseSimConfig(text.str());
}

void UpdatePfWeights(std::span<double> averages, std::span<const double> rates,
                     double horizon, std::span<double> weights) {
  if (!(horizon >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "PF horizon must be >= 1");
  const double keep = 1.0 - 1.0 / horizon;
  double mean = 0.0;
  for (size_t k = 0; k < averages.size(); ++k) {
    averages[k] = keep * averages[k] + rates[k] / horizon;
    mean += averages[k];
  }
  mean /= std::max<size_t>(1, averages.size());
  const double floor = std::max(1e-6 * mean, 1e-300);
  for (size_t k = 0; k < averages.size(); ++k) {
    weights[k] = 1.0 / std::max(averages[k], floor);
  }
}

double Percentile(std::vector<double> values, double fraction) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double position = fraction * (values.size() - 1);
  const size_t lower = static_cast<size_t>(std::floor(position));
  const size_t upper = std::min(lower + 1, values.size() - 1);
  return values[lower] + (position - lower) * (values[upper] - values[lower]);
}

void SeriesStats::Merge(const SeriesStats& other) {
  intervals += other.intervals;
  total_bits += other.total_bits;
  user_mean_bits.insert(user_mean_bits.end(), other.user_mean_bits.begin(),
                        other.user_mean_bits.end());
  metric_cost += other.metric_cost;
  all_pairs_cost += other.all_pairs_cost;
  objective += other.objective;
  phase1_objective += other.phase1_objective;
  phase1_cost += other.phase1_cost;
  phase2_cost += other.phase2_cost;
  on_demand_checks += other.on_demand_checks;
  on_demand_mismatches += other.on_demand_mismatches;
  full_mode_cost += other.full_mode_cost;
  invalid_allocations += other.invalid_allocations;
  objective_mismatches += other.objective_mismatches;
  max_set_size = std::max(max_set_size, other.max_set_size);
}

double SeriesStats::mean_se(int num_rbs) const {
  return intervals > 0 ? total_bits / (static_cast<double>(intervals) * num_rbs) : 0.0;
}

double SeriesStats::edge_se(int num_rbs) const {
  return Percentile(user_mean_bits, 0.05) / num_rbs;
}

double SeriesStats::normalized_cost() const {
  return all_pairs_cost > 0.0 ? metric_cost / all_pairs_cost : 0.0;
}

bool SimResult::invariants_ok() const {
  for (const SeriesStats& s : series) {
    if (s.invalid_allocations || s.on_demand_mismatches || s.objective_mismatches) return false;
  }
  return true;
}

std::vector<SeriesStats> RunDrop(const SimConfig& config, int snr_index, int drop) {
  const int n = config.num_rbs;
  const int k = config.num_users;
  const double snr = std::pow(10.0, config.snr_db[snr_index] / 10.0);
  const double base_power = config.snr_reference == SnrReference::kPerRb ? snr : snr * n;

  std::vector<double> powers(k, base_power);
  std::vector<double> long_term_db(k, config.snr_db[snr_index]);
  for (int u = 0; u < static_cast<int>(config.user_power_offsets_db.size()); ++u) {
    powers[u] *= std::pow(10.0, config.user_power_offsets_db[u] / 10.0);
    long_term_db[u] += config.user_power_offsets_db[u];
  }
  ControlConfig control;
  if (config.control.enabled) {
    control.num_cces = config.control.num_cces;
    control.levels = config.control.levels;
    if (control.levels.empty()) {
      for (int u = 0; u < k; ++u) {
        control.levels.push_back(AggregationLevelFor(long_term_db[u], config.control.thresholds_db));
      }
    }
  }

  MetricConfig metric_config;
  metric_config.antenna_selection = config.antenna_selection;
  if (config.mcs) metric_config.mcs_table = DefaultMcsTable();

  std::vector<SolverState> states;
  for (Receiver receiver : config.receivers) {
    for (SolverKind kind : config.solvers) {
      SolverState state{kind, receiver, std::vector<double>(k, 1.0),
                        std::vector<double>(k, 1.0), std::vector<double>(k, 0.0), {}};
      state.stats.snr_db = config.snr_db[snr_index];
      state.stats.solver = kind;
      state.stats.receiver = receiver;
      states.push_back(std::move(state));
    }
  }

  const ChannelDims dims{k, config.tx_antennas, n, config.rx_antennas};
  const std::vector<UserSet> all_sets =
      EnumerateUserSets(k, config.max_coscheduled, GroupPartition::Singletons(k));
  std::vector<double> rates(k);
  for (int t = 0; t < config.intervals; ++t) {
    const ChannelRealization channel = GenerateChannels(dims, IntervalSeed(config.seed, drop, t));
    for (SolverState& state : states) {
      std::vector<UserRadioState> radio(k);
      for (int u = 0; u < k; ++u) {
        radio[u] = {powers[u], state.weights[u], config.queue_bits};
      }
      MetricConfig mc = metric_config;
      mc.receiver = state.receiver;
      MetricProvider provider(channel, radio, mc);

      Instance::Options options;
      options.num_rbs = n;
      options.num_users = k;
      options.max_coscheduled = config.max_coscheduled;
      if (config.preselection.mode == PreselectConfig::Mode::kRule) {
        const std::vector<int> chosen = Preselect(
            config.preselection.rule, config.preselection.k_tilde, BuildPreselectTables(provider));
        for (const UserSet& users : all_sets) {
          bool inside = true;
          for (int u : users.users()) {
            inside = inside && std::binary_search(chosen.begin(), chosen.end(), u);
          }
          if (inside) options.user_sets.push_back(users);
        }
      } else if (config.preselection.mode == PreselectConfig::Mode::kKnapsack) {
        options.generic_rows.push_back(UserLimitKnapsack(config.preselection.k_tilde));
      }
      auto base = std::make_unique<Instance>(std::move(options));

      std::unique_ptr<ControlExpansion> expansion;
      std::unique_ptr<VirtualMetrics> virtual_metrics;
      const Instance* instance = base.get();
      PairMetrics* metrics = &provider;
      if (config.control.enabled) {
        control.subframe = t;
        expansion = std::make_unique<ControlExpansion>(ExpandControlInstance(*base, control));
        virtual_metrics = std::make_unique<VirtualMetrics>(provider, expansion->map.base_of);
        instance = &expansion->instance;
        metrics = virtual_metrics.get();
      }

      SolveOutcome outcome = Solve(state.kind, *instance, *metrics, config.on_demand);
      SeriesStats& stats = state.stats;
      ++stats.intervals;
      stats.metric_cost += outcome.cost;
      stats.all_pairs_cost += AllPairsCost(*instance, *metrics);
      stats.objective += outcome.objective;
      stats.phase1_objective += outcome.phase1_objective;
      stats.phase1_cost += outcome.phase1_cost;
      stats.phase2_cost += outcome.phase2_cost;
      if (!ValidateAllocation(*instance, outcome.allocation).valid()) ++stats.invalid_allocations;

      if (config.check_on_demand) {
        MetricProvider fresh(channel, radio, mc);
        std::unique_ptr<VirtualMetrics> fresh_virtual;
        PairMetrics* fresh_metrics = &fresh;
        if (expansion) {
          fresh_virtual = std::make_unique<VirtualMetrics>(fresh, expansion->map.base_of);
          fresh_metrics = fresh_virtual.get();
        }
        const SolveOutcome full = Solve(state.kind, *instance, *fresh_metrics, !config.on_demand);
        ++stats.on_demand_checks;
        stats.full_mode_cost += full.cost;
        if (full.allocation.pairs != outcome.allocation.pairs ||
            full.objective != outcome.objective) {
          ++stats.on_demand_mismatches;
        }
      }

      std::fill(rates.begin(), rates.end(), 0.0);
      double weighted = 0.0;
      for (const Assignment& assignment : outcome.allocation.pairs) {
        const UserSet users =
            expansion ? ToBaseUsers(assignment.users, expansion->map.base_of) : assignment.users;
        stats.max_set_size = std::max(stats.max_set_size, users.size());
        const PairEvaluation eval = provider.Evaluate(users, assignment.chunk);
        weighted += eval.weighted_sum;
        for (int i = 0; i < users.size(); ++i) rates[users[i]] += eval.user_bits[i];
      }
      if (std::abs(weighted - outcome.objective) > 1e-9 * std::max(1.0, std::abs(weighted))) {
        ++stats.objective_mismatches;
      }
      for (int u = 0; u < k; ++u) {
        stats.total_bits += rates[u];
        state.drop_bits[u] += rates[u];
      }
      UpdatePfWeights(state.averages, rates, config.pf_horizon, state.weights);
    }
  }

  std::vector<SeriesStats> out;
  for (SolverState& state : states) {
    for (int u = 0; u < k; ++u) {
      state.stats.user_mean_bits.push_back(state.drop_bits[u] / config.intervals);
    }
    out.push_back(std::move(state.stats));
  }
  return out;
}

SimResult RunSimulation(const SimConfig& config) {
  const int snrs = static_cast<int>(config.snr_db.size());
  const int jobs = snrs * config.drops;
  std::vector<std::vector<SeriesStats>> results(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int job = next++; job < jobs; job = next++) {
      try {
        results[job] = RunDrop(config, job / config.drops, job % config.drops);
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, jobs);
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& thread : pool) thread.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  // Reduce in (snr, drop) order so the totals do not depend on scheduling.
  SimResult result;
  for (int s = 0; s < snrs; ++s) {
    std::vector<SeriesStats> merged = results[s * config.drops];
    for (int d = 1; d < config.drops; ++d) {
      const auto& fragment = results[s * config.drops + d];
      for (size_t i = 0; i < merged.size(); ++i) merged[i].Merge(fragment[i]);
    }
    for (SeriesStats& series : merged) result.series.push_back(std::move(series));
  }
  return result;
}

void WriteResults(const SimConfig& config, const SimResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&dir](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  std::ofstream csv(path("results.csv"));
  if (!csv) throw Error(ErrorCode::kInvalidArgument, "cannot write results in " + dir);
  csv << "# mean_se_bps_hz = total bits / (intervals x N RBs), averaged over drops\n";
  csv << "# edge_se_bps_hz = 5th percentile of per-user mean bits per interval / N\n";
  csv << (config.snr_reference == SnrReference::kPerRb
              ? "# snr_db = P_k over unit noise on one RB (full power on a single RB)\n"
              : "# snr_db = P_k / N over unit noise (full power spread over all N RBs)\n");
  csv << "# normalized_cost = metric_cost / cost of computing every pair metric\n";
  csv << "# N=" << config.num_rbs << " K=" << config.num_users << " N_r=" << config.rx_antennas
      << " N_t=" << config.tx_antennas << " T=" << config.max_coscheduled
      << " drops=" << config.drops << " intervals=" << config.intervals
      << " seed=" << config.seed << " pf_horizon=" << config.pf_horizon << "\n";
  if (config.control.enabled) {
    csv << "# pdcch hash Y <- " << kPdcchHashA << " * Y mod " << kPdcchHashD
        << ", Y0 = user id (1-based), applied once per interval\n";
  }
  if (config.preselection.mode == PreselectConfig::Mode::kRule && config.antenna_selection) {
    csv << "# pre-selection tables use the best antenna per entry\n";
  }
  csv << "snr_db,solver,receiver,mean_se_bps_hz,edge_se_bps_hz,metric_cost,normalized_cost\n";
  csv.precision(10);
  for (const SeriesStats& s : result.series) {
    csv << s.snr_db << ',' << SolverName(s.solver) << ',' << ReceiverName(s.receiver) << ','
        << s.mean_se(config.num_rbs) << ','
        << s.edge_se(config.num_rbs) << ',' << s.metric_cost << ',' << s.normalized_cost()
        << '\n';
  }

  std::ofstream diag(path("diagnostics.csv"));
  diag.precision(10);
  diag << "snr_db,solver,receiver,intervals,objective,phase1_objective,phase1_cost,"
          "phase2_cost,all_pairs_cost,on_demand_checks,on_demand_mismatches,full_mode_cost,"
          "invalid_allocations,objective_mismatches,max_set_size\n";
  for (const SeriesStats& s : result.series) {
    diag << s.snr_db << ',' << SolverName(s.solver) << ',' << ReceiverName(s.receiver) << ','
         << s.intervals << ',' << s.objective << ',' << s.phase1_objective << ','
         << s.phase1_cost << ',' << s.phase2_cost << ',' << s.all_pairs_cost << ','
         << s.on_demand_checks << ',' << s.on_demand_mismatches << ',' << s.full_mode_cost
         << ',' << s.invalid_allocations << ',' << s.objective_mismatches << ','
         << s.max_set_size << '\n';
  }

  std::ofstream users(path("user_throughput.csv"));
  users.precision(10);
  users << "snr_db,solver,receiver,drop,user,mean_bits_per_interval\n";
  for (const SeriesStats& s : result.series) {
    for (size_t i = 0; i < s.user_mean_bits.size(); ++i) {
      users << s.snr_db << ',' << SolverName(s.solver) << ',' << ReceiverName(s.receiver) << ','
            << i / config.num_users + 1 << ',' << i % config.num_users + 1 << ','
            << s.user_mean_bits[i] << '\n';
    }
  }
}

}  // namespace ulms
