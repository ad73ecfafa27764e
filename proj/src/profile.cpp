// Copyright 2026 The pathrec Authors
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

#include "pathrec/profile.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pathrec/rng.hpp"

namespace pathrec {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

UserProfile make_profile(EntityId user, const std::vector<int>& weights,
                         bool under_budget) {
  UserProfile p;
  p.user = user;
  p.under_budget = under_budget;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0) {
      p.entries.push_back(ProfileEntry{static_cast<int>(j), weights[j]});
    }
  }
  return p;
}
}  // namespace

double prominence(const ReasonerModel& model, const KnowledgeGraph& graph,
                  EntityId user, const Pattern& pattern,
                  std::span<const PathSample> samples, int cap) {
  if (samples.empty()) return kNegInf;
  std::size_t n = std::min<std::size_t>(samples.size(), cap < 0 ? 0 : cap);
  if (n == 0) return kNegInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PathSample& s = samples[i];
    if (s.path.relations != pattern.relations ||
        s.path.entities.front() != user) {
      throw std::invalid_argument(
          "prominence: sample does not match the pattern/user");
    }
    sum += path_log_prob(model, graph, s.path);
  }
  return sum / static_cast<double>(n);
}

UserProfile compose_profile(EntityId user, const std::vector<Pattern>& patterns,
                            const std::vector<double>& values, int budget,
                            const std::vector<int>& bounds) {
  if (values.size() != patterns.size() || bounds.size() != patterns.size()) {
    throw std::invalid_argument("compose_profile: size mismatch");
  }
  if (budget < 0) throw std::invalid_argument("compose_profile: negative budget");

  std::vector<std::size_t> idx(patterns.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    if (patterns[a].frequency != patterns[b].frequency) {
      return patterns[a].frequency > patterns[b].frequency;
    }
    return a < b;
  });

  std::vector<int> weights(patterns.size(), 0);
  int remaining = budget;
  for (std::size_t j : idx) {
    if (remaining == 0) break;
    if (values[j] == kNegInf || std::isnan(values[j])) continue;
    int take = std::min(remaining, std::max(0, bounds[j]));
    weights[j] = take;
    remaining -= take;
  }
  return make_profile(user, weights, remaining > 0);
}

UserProfile compose_rand(EntityId user, const std::vector<Pattern>& patterns,
                         int budget, const std::vector<int>& bounds,
                         std::uint64_t seed) {
  if (bounds.size() != patterns.size()) {
    throw std::invalid_argument("compose_rand: size mismatch");
  }
  Rng rng(mix_seed(seed, user, 0x4A4D));
  std::vector<std::size_t> feasible;
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    if (bounds[j] > 0) feasible.push_back(j);
  }
  std::vector<int> weights(patterns.size(), 0);
  if (feasible.empty()) return make_profile(user, weights, budget > 0);

  // Sample a nonempty random subset, then spread the budget uniformly over
  // it one unit at a time.
  std::vector<std::size_t> subset;
  while (subset.empty()) {
    for (std::size_t j : feasible) {
      if (rng.next_u64() & 1) subset.push_back(j);
    }
  }
  int remaining = budget;
  while (remaining > 0 && !subset.empty()) {
    std::size_t pick = rng.next_index(subset.size());
    std::size_t j = subset[pick];
    ++weights[j];
    --remaining;
    if (weights[j] >= bounds[j]) subset.erase(subset.begin() + pick);
  }
  return make_profile(user, weights, remaining > 0);
}

UserProfile compose_prior(const std::vector<Pattern>& patterns, int budget,
                          const std::vector<char>* keep) {
  std::vector<int> weights(patterns.size(), 0);
  auto kept = [&](std::size_t j) { return keep == nullptr || (*keep)[j] != 0; };
  double total = 0.0;
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    if (kept(j)) total += static_cast<double>(patterns[j].frequency);
  }
  if (total <= 0.0 || budget <= 0) return make_profile(kNoEntity, weights, budget > 0);

  // Largest-remainder rounding of budget * freq / total.
  std::vector<double> remainder(patterns.size(), -1.0);
  std::vector<std::size_t> idx;
  int assigned = 0;
  for (std::size_t j = 0; j < patterns.size(); ++j) {
    if (!kept(j)) continue;
    double quota = budget * static_cast<double>(patterns[j].frequency) / total;
    weights[j] = static_cast<int>(std::floor(quota));
    remainder[j] = quota - weights[j];
    assigned += weights[j];
    idx.push_back(j);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a < b;
  });
  for (std::size_t k = 0; assigned < budget; ++k) {
    ++weights[idx[k % idx.size()]];
    ++assigned;
  }
  return make_profile(kNoEntity, weights, false);
}

void write_profiles(const std::string& path, const KnowledgeGraph& graph,
                    const std::vector<UserProfile>& profiles,
                    const ArtifactHeader& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  ArtifactHeader h = header;
  h["artifact"] = "profiles";
  out << format_artifact_header(h);
  for (const UserProfile& p : profiles) {
    out << graph.entity_token(p.user) << '\t';
    for (std::size_t k = 0; k < p.entries.size(); ++k) {
      if (k) out << ',';
      // Pattern ranks are 1-based in artifacts, matching patterns.tsv.
      out << p.entries[k].pattern_idx + 1 << ':' << p.entries[k].weight;
    }
    out << '\n';
  }
}

std::vector<UserProfile> read_profiles(const std::string& path,
                                       const KnowledgeGraph& graph,
                                       ArtifactHeader* header) {
  if (header) *header = parse_artifact_header(path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  std::vector<UserProfile> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tsv(line);
    if (f.size() != 2) {
      throw std::runtime_error(fmt::format("{}:{}: expected 2 fields", path, line_no));
    }
    UserProfile p;
    p.user = graph.entity_id(f[0]);
    if (p.user == kNoEntity) {
      throw std::runtime_error(
          fmt::format("{}:{}: unknown user '{}'", path, line_no, f[0]));
    }
    std::size_t pos = 0;
    while (pos < f[1].size()) {
      std::size_t comma = f[1].find(',', pos);
      std::string item = f[1].substr(pos, comma == std::string::npos
                                              ? std::string::npos
                                              : comma - pos);
      std::size_t colon = item.find(':');
      if (colon == std::string::npos) {
        throw std::runtime_error(
            fmt::format("{}:{}: malformed entry '{}'", path, line_no, item));
      }
      ProfileEntry e;
      e.pattern_idx = std::stoi(item.substr(0, colon)) - 1;
      e.weight = std::stoi(item.substr(colon + 1));
      if (e.pattern_idx < 0 || e.weight <= 0) {
        throw std::runtime_error(
            fmt::format("{}:{}: invalid entry '{}'", path, line_no, item));
      }
      p.entries.push_back(e);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace pathrec
