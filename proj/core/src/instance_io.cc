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

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ulms/error.h"

namespace ulms {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void Fail(const std::string& what) { throw Error(ErrorCode::kParse, what); }

const Json& Field(const Json& doc, const char* key) {
  if (!doc.contains(key)) Fail(std::string("missing field '") + key + "'");
  return doc.at(key);
}

int IndexFrom(const Json& value, int limit, const char* what) {
  const int index = value.get<int>() - 1;
  if (index < 0 || index >= limit) Fail(std::string(what) + " id out of range");
  return index;
}

UserSet UsersFrom(const Json& value, int num_users) {
  std::vector<int> users;
  for (const Json& id : value) users.push_back(IndexFrom(id, num_users, "user"));
  std::sort(users.begin(), users.end());
  return UserSet(std::move(users));
}

Chunk ChunkFrom(const Json& entry, int num_rbs) {
  Chunk chunk{IndexFrom(Field(entry, "head"), num_rbs, "RB"),
              IndexFrom(Field(entry, "tail"), num_rbs, "RB")};
  if (chunk.head > chunk.tail) Fail("chunk head after tail");
  return chunk;
}

OrderedJson UsersJson(const UserSet& users) {
  OrderedJson out = OrderedJson::array();
  for (int user : users.users()) out.push_back(user + 1);
  return out;
}

GenericRow RowFrom(const Json& row, int num_users, int num_rbs) {
  const std::string type = Field(row, "type").get<std::string>();
  if (type == "user_count") return GenericRow::UserLimit(Field(row, "limit").get<int>());
  if (type == "additive") {
    GenericRow::Additive additive;
    additive.weights = Field(row, "weights").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(additive.weights.size()) != num_users) {
      Fail("additive knapsack needs one weight list per user");
    }
    for (const auto& per_user : additive.weights) {
      if (static_cast<int>(per_user.size()) != num_rbs) {
        Fail("additive knapsack needs one weight per RB");
      }
    }
    return GenericRow(std::move(additive));
  }
  if (type == "table") {
    GenericRow::Table table;
    table.default_weight = row.value("default", 0.0);
    for (const Json& entry : row.value("entries", Json::array())) {
      table.entries[{UsersFrom(Field(entry, "users"), num_users),
                     ChunkFrom(entry, num_rbs)}] = Field(entry, "weight").get<double>();
    }
    return GenericRow(std::move(table));
  }
  Fail("unknown knapsack type '" + type + "'");
}

std::unique_ptr<CachedMetrics> ChannelMetricsFrom(const Json& block, int num_users,
                                                  int num_rbs) {
  ChannelDims dims;
  dims.users = num_users;
  dims.rbs = num_rbs;
  dims.rx_antennas = block.value("rx_antennas", 1);
  dims.tx_antennas = block.value("tx_antennas", 1);
  const uint64_t seed = block.value("seed", uint64_t{1});
  const double power = std::pow(10.0, block.value("snr_db", 10.0) / 10.0);
  std::vector<UserRadioState> radio(num_users);
  const auto weights = block.value("weights", std::vector<double>(num_users, 1.0));
  if (static_cast<int>(weights.size()) != num_users) Fail("one weight per user required");
  for (int u = 0; u < num_users; ++u) {
    radio[u].power = power;
    radio[u].weight = weights[u];
  }
  if (block.contains("queue_bits")) {
    const auto queues = block.at("queue_bits").get<std::vector<double>>();
    if (static_cast<int>(queues.size()) != num_users) Fail("one queue per user required");
    for (int u = 0; u < num_users; ++u) radio[u].queue_bits = queues[u];
  }
  MetricConfig config;
  const std::string receiver = block.value("receiver", std::string("mmse"));
  if (receiver == "mmse") {
    config.receiver = Receiver::kMmse;
  } else if (receiver == "sic") {
    config.receiver = Receiver::kSic;
  } else {
    Fail("receiver must be 'mmse' or 'sic'");
  }
  config.antenna_selection = block.value("antenna_selection", false);
  if (block.value("mcs", false)) config.mcs_table = DefaultMcsTable();
  return std::make_unique<MetricProvider>(GenerateChannels(dims, seed), std::move(radio),
                                          std::move(config));
}

}  // namespace

LoadedInstance ParseInstance(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    Fail(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (Field(doc, "format").get<std::string>() != kInstanceFormat) Fail("unknown format");
    if (Field(doc, "version").get<int>() != kInstanceVersion) Fail("unsupported version");
    Instance::Options options;
    options.num_rbs = Field(doc, "N").get<int>();
    options.num_users = Field(doc, "K").get<int>();
    options.max_coscheduled = Field(doc, "T").get<int>();
    if (options.num_rbs < 1 || options.num_users < 1) {
      throw Error(ErrorCode::kEmptyInstance, "instance needs N >= 1 and K >= 1");
    }
    const int n = options.num_rbs;
    const int k = options.num_users;
    if (doc.contains("groups")) {
      std::vector<std::vector<int>> groups;
      for (const Json& group : doc.at("groups")) {
        groups.emplace_back();
        for (const Json& id : group) groups.back().push_back(IndexFrom(id, k, "user"));
      }
      options.partition = GroupPartition::FromGroups(k, groups);
    }
    if (doc.contains("user_sets")) {
      for (const Json& set : doc.at("user_sets")) options.user_sets.push_back(UsersFrom(set, k));
    }
    for (const Json& row : doc.value("generic_knapsacks", Json::array())) {
      options.generic_rows.push_back(RowFrom(row, k, n));
    }
    if (doc.contains("sparse_knapsacks")) {
      const Json& sparse = doc.at("sparse_knapsacks");
      options.sparse.num_rows = Field(sparse, "rows").get<int>();
      const Json& rows_of_user = Field(sparse, "rows_of_user");
      if (static_cast<int>(rows_of_user.size()) != k) Fail("rows_of_user needs one list per user");
      for (const Json& rows : rows_of_user) {
        options.sparse.rows_of_user.emplace_back();
        for (const Json& row : rows) {
          options.sparse.rows_of_user.back().push_back(
              IndexFrom(row, options.sparse.num_rows, "sparse row"));
        }
      }
    }

    LoadedInstance loaded;
    if (doc.contains("metric_table")) {
      const Json& table = doc.at("metric_table");
      std::map<PairKey, double> entries;
      for (const Json& entry : table.value("entries", Json::array())) {
        const double value = Field(entry, "value").get<double>();
        if (!(value >= 0.0) || !std::isfinite(value)) Fail("metric values must be finite and >= 0");
        entries[{UsersFrom(Field(entry, "users"), k), ChunkFrom(entry, n)}] = value;
      }
      loaded.metrics = std::make_unique<TableMetrics>(std::move(entries),
                                                      table.value("default", 0.0));
    } else if (doc.contains("channel")) {
      loaded.metrics = ChannelMetricsFrom(doc.at("channel"), k, n);
    } else {
      Fail("instance needs 'metric_table' or 'channel'");
    }
    loaded.instance = std::make_unique<Instance>(std::move(options));
    return loaded;
  } catch (const Json::exception& e) {
    Fail(std::string("malformed instance: ") + e.what());
  }
}

LoadedInstance LoadInstanceFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseInstance(text.str());
}

std::string SerializeInstance(const Instance& instance, PairMetrics& metrics) {
  OrderedJson doc;
  doc["format"] = kInstanceFormat;
  doc["version"] = kInstanceVersion;
  doc["N"] = instance.num_rbs();
  doc["K"] = instance.num_users();
  doc["T"] = instance.max_coscheduled();
  OrderedJson groups = OrderedJson::array();
  for (const auto& group : instance.partition().Groups()) {
    OrderedJson ids = OrderedJson::array();
    for (int user : group) ids.push_back(user + 1);
    groups.push_back(ids);
  }
  doc["groups"] = groups;
  OrderedJson sets = OrderedJson::array();
  for (const UserSet& users : instance.user_sets()) sets.push_back(UsersJson(users));
  doc["user_sets"] = sets;

  OrderedJson rows = OrderedJson::array();
  for (const GenericRow& row : instance.generic_rows()) {
    OrderedJson out;
    if (const auto* count = std::get_if<GenericRow::UserCount>(&row.spec())) {
      out["type"] = "user_count";
      out["limit"] = count->limit;
    } else if (const auto* additive = std::get_if<GenericRow::Additive>(&row.spec())) {
      out["type"] = "additive";
      out["weights"] = additive->weights;
    } else if (const auto* table = std::get_if<GenericRow::Table>(&row.spec())) {
      out["type"] = "table";
      out["default"] = table->default_weight;
      OrderedJson entries = OrderedJson::array();
      for (const auto& [key, weight] : table->entries) {
        entries.push_back({{"users", UsersJson(key.first)},
                           {"head", key.second.head + 1},
                           {"tail", key.second.tail + 1},
                           {"weight", weight}});
      }
      out["entries"] = entries;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "callback knapsack rows cannot be serialized");
    }
    rows.push_back(out);
  }
  doc["generic_knapsacks"] = rows;

  if (!instance.sparse().empty()) {
    OrderedJson sparse;
    sparse["rows"] = instance.sparse().num_rows;
    OrderedJson per_user = OrderedJson::array();
    for (int u = 0; u < instance.num_users(); ++u) {
      OrderedJson ids = OrderedJson::array();
      if (u < static_cast<int>(instance.sparse().rows_of_user.size())) {
        for (int row : instance.sparse().rows_of_user[u]) ids.push_back(row + 1);
      }
      per_user.push_back(ids);
    }
    sparse["rows_of_user"] = per_user;
    doc["sparse_knapsacks"] = sparse;
  }

  OrderedJson entries = OrderedJson::array();
  for (PairId pair = 0; pair < instance.num_pairs(); ++pair) {
    const double value = metrics.Metric(instance.users_of(pair), instance.chunk_of(pair));
    if (value == 0.0) continue;
    entries.push_back({{"users", UsersJson(instance.users_of(pair))},
                       {"head", instance.chunk_of(pair).head + 1},
                       {"tail", instance.chunk_of(pair).tail + 1},
                       {"value", value}});
  }
  doc["metric_table"] = {{"default", 0.0}, {"entries", entries}};
  return doc.dump(2) + "\n";
}

}  // namespace ulms
