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

#pragma once

#include <span>
#include <vector>

#include "pathrec/reasoner.hpp"

namespace pathrec {

// Weighted multiset of patterns steering path generation for one user: the
// weight of a pattern is the number of paths to generate with it.
struct ProfileEntry {
  int pattern_idx = -1;
  int weight = 0;
};

struct UserProfile {
  EntityId user = kNoEntity;
  std::vector<ProfileEntry> entries;  // pattern_idx ascending, weights > 0
  // Set when sum(bounds) < budget forced a smaller total.
  bool under_budget = false;

  int total_weight() const {
    int s = 0;
    for (const auto& e : entries) s += e.weight;
    return s;
  }
};

// Mean path log-probability over up to `cap` of the user's sampled paths for
// this pattern; -inf when no path instantiates the pattern (unusable).
// Samples must all carry this pattern and start at `user`.
double prominence(const ReasonerModel& model, const KnowledgeGraph& graph,
                  EntityId user, const Pattern& pattern,
                  std::span<const PathSample> samples, int cap);

// Fills the budget greedily by descending value, respecting per-pattern
// bounds. With unit weights the greedy solution is an exact optimum of the
// bounded knapsack. Patterns valued -inf are never selected. Ties break by
// global frequency, then pattern index.
UserProfile compose_profile(EntityId user, const std::vector<Pattern>& patterns,
                            const std::vector<double>& values, int budget,
                            const std::vector<int>& bounds);

// Baseline: budget spread uniformly at random across feasible patterns.
UserProfile compose_rand(EntityId user, const std::vector<Pattern>& patterns,
                         int budget, const std::vector<int>& bounds,
                         std::uint64_t seed);

// Baseline: one shared profile, weights proportional to global pattern
// frequencies (largest-remainder rounding); zero-weight patterns dropped.
// `keep`, when given, restricts the computation to the flagged patterns.
UserProfile compose_prior(const std::vector<Pattern>& patterns, int budget,
                          const std::vector<char>* keep = nullptr);

void write_profiles(const std::string& path, const KnowledgeGraph& graph,
                    const std::vector<UserProfile>& profiles,
                    const ArtifactHeader& header);
std::vector<UserProfile> read_profiles(const std::string& path,
                                       const KnowledgeGraph& graph,
                                       ArtifactHeader* header = nullptr);

}  // namespace pathrec
