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
#include <unordered_set>
#include <vector>

#include "pathrec/common.hpp"

namespace pathrec {

// All four measures are percentages in [0, 100].
struct MetricsAtK {
  double ndcg = 0.0;
  double recall = 0.0;
  double hit_rate = 0.0;
  double precision = 0.0;
};

// Binary-relevance top-k metrics. NDCG uses the log2 position discount with
// the ideal DCG over min(k, |relevant|). `relevant` must be nonempty.
MetricsAtK metrics_at_k(std::span<const EntityId> recommended,
                        const std::unordered_set<EntityId>& relevant, int k = 10);

struct PerUserMetrics {
  EntityId user = kNoEntity;
  MetricsAtK metrics;
};

struct MetricsReport {
  int k = 10;
  std::string variant;
  std::uint64_t config_hash = 0;
  std::size_t users_evaluated = 0;
  MetricsAtK macro;
  std::vector<PerUserMetrics> per_user;
};

MetricsAtK macro_average(const std::vector<PerUserMetrics>& per_user);

}  // namespace pathrec
