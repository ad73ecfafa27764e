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

#include "pathrec/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace pathrec {

MetricsAtK metrics_at_k(std::span<const EntityId> recommended,
                        const std::unordered_set<EntityId>& relevant, int k) {
  if (relevant.empty()) {
    throw std::invalid_argument("metrics_at_k: empty relevant set");
  }
  if (k <= 0) throw std::invalid_argument("metrics_at_k: k must be positive");

  std::size_t depth = std::min<std::size_t>(recommended.size(), k);
  int hits = 0;
  double dcg = 0.0;
  for (std::size_t pos = 0; pos < depth; ++pos) {
    if (relevant.count(recommended[pos])) {
      ++hits;
      dcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
    }
  }
  std::size_t ideal = std::min<std::size_t>(relevant.size(), k);
  double idcg = 0.0;
  for (std::size_t pos = 0; pos < ideal; ++pos) {
    idcg += 1.0 / std::log2(static_cast<double>(pos) + 2.0);
  }

  MetricsAtK m;
  m.ndcg = idcg > 0.0 ? 100.0 * dcg / idcg : 0.0;
  m.recall = 100.0 * hits / static_cast<double>(relevant.size());
  m.hit_rate = hits > 0 ? 100.0 : 0.0;
  m.precision = 100.0 * hits / static_cast<double>(k);
  return m;
}

MetricsAtK macro_average(const std::vector<PerUserMetrics>& per_user) {
  MetricsAtK m;
  if (per_user.empty()) return m;
  for (const auto& u : per_user) {
    m.ndcg += u.metrics.ndcg;
    m.recall += u.metrics.recall;
    m.hit_rate += u.metrics.hit_rate;
    m.precision += u.metrics.precision;
  }
  double n = static_cast<double>(per_user.size());
  m.ndcg /= n;
  m.recall /= n;
  m.hit_rate /= n;
  m.precision /= n;
  return m;
}

}  // namespace pathrec
