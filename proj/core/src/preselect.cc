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

#include "ulms/preselect.h"

#include <algorithm>
#include <numeric>

#include "ulms/error.h"

namespace ulms {

PreselectTables::PreselectTables(int users, int rbs)
    : users_(users),
      rbs_(rbs),
      su_(static_cast<size_t>(users) * rbs, 0.0),
      mmse_(static_cast<size_t>(users) * users * rbs, 0.0),
      sic_last_(static_cast<size_t>(users) * users * rbs, 0.0),
      sic_first_(static_cast<size_t>(users) * users, 0) {
  for (int u = 0; u < users; ++u) {
    for (int v = 0; v < users; ++v) sic_first_[u * users + v] = std::min(u, v);
  }
}

double PreselectTables::sic(int u, int v, int j) const {
  return su(sic_first(u, v), j) + sic_last(u, v, j);
}

int PreselectTables::sic_first(int u, int v) const { return sic_first_[u * users_ + v]; }

void PreselectTables::set_mmse(int u, int v, int j, double value) {
  mmse_[PairIndex(u, v, j)] = value;
  mmse_[PairIndex(v, u, j)] = value;
}

void PreselectTables::set_sic_last(int u, int v, int j, double value) {
  sic_last_[PairIndex(u, v, j)] = value;
  sic_last_[PairIndex(v, u, j)] = value;
}

void PreselectTables::set_sic_first(int u, int v, int first) {
  sic_first_[u * users_ + v] = first;
  sic_first_[v * users_ + u] = first;
}

PreselectTables BuildPreselectTables(const MetricProvider& provider) {
  const ChannelDims& dims = provider.channel().dims();
  const auto& radio = provider.users();
  const int antennas = provider.config().antenna_selection ? dims.tx_antennas : 1;
  PreselectTables tables(dims.users, dims.rbs);
  for (int u = 0; u < dims.users; ++u) {
    for (int j = 0; j < dims.rbs; ++j) {
      double best = 0.0;
      for (int a = 0; a < antennas; ++a) {
        best = std::max(best, provider.RateSuAt(u, a, j, radio[u].power));
      }
      tables.set_su(u, j, best);
    }
  }
  for (int u = 0; u < dims.users; ++u) {
    for (int v = u + 1; v < dims.users; ++v) {
      const bool u_first = radio[u].weight >= radio[v].weight;
      const int first = u_first ? u : v;
      const int last = u_first ? v : u;
      tables.set_sic_first(u, v, first);
      for (int j = 0; j < dims.rbs; ++j) {
        double mmse = 0.0;
        double sic = -1.0;
        double sic_last = 0.0;
        for (int a = 0; a < antennas; ++a) {
          for (int b = 0; b < antennas; ++b) {
            mmse = std::max(mmse, provider.RateMmseAt(u, v, a, b, j, radio[u].power,
                                                      radio[v].power));
            const int af = u_first ? a : b;
            const int al = u_first ? b : a;
            const PairRates rates = SicPairRates(
                provider.channel().gain(first, af, j),
                provider.channel().gain(last, al, j), radio[first].power,
                radio[last].power, /*u_interference_free=*/true);
            const double first_part = radio[first].weight * rates.first;
            const double last_part = radio[last].weight * rates.second;
            if (first_part + last_part > sic) {
              sic = first_part + last_part;
              sic_last = last_part;
            }
          }
        }
        tables.set_mmse(u, v, j, mmse);
        // With antenna selection the jointly best choice may leave the first
        // user below its own best SU rate; the stored last term then absorbs
        // the difference so the pair rate stays the jointly best one.
        tables.set_sic_last(
            u, v, j,
            antennas == 1 ? sic_last : std::max(0.0, sic - tables.su(first, j)));
      }
    }
  }
  return tables;
}

double EvalSetFunction(PreselectRule rule, const PreselectTables& tables,
                       std::span<const int> subset) {
  if (rule == PreselectRule::kTopK) {
    throw Error(ErrorCode::kInvalidArgument, "top-K rule has no set function");
  }
  if (subset.empty()) return 0.0;
  const int size = static_cast<int>(subset.size());
  double total = 0.0;
  for (int j = 0; j < tables.rbs(); ++j) {
    switch (rule) {
      case PreselectRule::kF: {
        double best = 0.0;
        for (int u : subset) best = std::max(best, tables.su(u, j));
        total += best;
        break;
      }
      case PreselectRule::kG: {
        double best = 0.0;
        for (int a = 0; a < size; ++a) {
          best = std::max(best, tables.su(subset[a], j));
          for (int b = a + 1; b < size; ++b) {
            best = std::max(best, tables.mmse(subset[a], subset[b], j));
          }
        }
        total += best;
        break;
      }
      case PreselectRule::kH: {
        double singles = 0.0;
        double pairs = 0.0;
        for (int a = 0; a < size; ++a) {
          singles += tables.su(subset[a], j);
          for (int b = a + 1; b < size; ++b) {
            pairs += tables.sic(subset[a], subset[b], j);
          }
        }
        total += (tables.users() - size + 1) * singles + pairs;
        break;
      }
      case PreselectRule::kTopK:
        break;
    }
  }
  return total;
}

std::vector<int> Preselect(PreselectRule rule, int limit,
                           const PreselectTables& tables) {
  const int users = tables.users();
  if (limit < 1 || limit > users) {
    throw Error(ErrorCode::kInvalidArgument, "pre-selection size out of range");
  }
  std::vector<int> chosen;
  if (rule == PreselectRule::kTopK) {
    std::vector<double> sums(users, 0.0);
    for (int u = 0; u < users; ++u) {
      for (int j = 0; j < tables.rbs(); ++j) sums[u] += tables.su(u, j);
    }
    std::vector<int> order(users);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sums[a] > sums[b]; });
    chosen.assign(order.begin(), order.begin() + limit);
  } else {
    std::vector<char> taken(users, 0);
    double current = 0.0;
    while (static_cast<int>(chosen.size()) < limit) {
      int best = -1;
      double best_gain = 0.0;
      std::vector<int> trial = chosen;
      trial.push_back(0);
      for (int u = 0; u < users; ++u) {
        if (taken[u]) continue;
        trial.back() = u;
        const double gain = EvalSetFunction(rule, tables, trial) - current;
        if (gain > best_gain) {
          best = u;
          best_gain = gain;
        }
      }
      if (best < 0) break;
      taken[best] = 1;
      chosen.push_back(best);
      current = EvalSetFunction(rule, tables, chosen);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace ulms
