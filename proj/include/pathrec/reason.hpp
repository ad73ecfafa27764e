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

#include "pathrec/layout.hpp"
#include "pathrec/reasoner.hpp"

namespace pathrec {

// Fine stage: walk the layout tree in level order. Each node evaluates its
// relation module once -- the input is the user embedding plus the parent
// node's output -- and every path arriving at the node expands to its
// top-n_x neighbors under the node's relation, ranked by dot product with
// the module output (ties to the lower entity id). Entities already on a
// path are not revisited. Dead ends prune silently; complete paths carry
// their final-hop dot product as score.
std::vector<ReasoningPath> tree_reason(const KnowledgeGraph& graph,
                                       const ReasonerModel& model, EntityId user,
                                       const LayoutTree& tree,
                                       ReasoningStats* stats = nullptr);

// Reference executor with identical selection semantics, run pattern by
// pattern and path by path with no shared-prefix reuse. Produces exactly the
// same path set as tree_reason; exists as the batching oracle and the
// efficiency baseline.
std::vector<ReasoningPath> individual_reason(const KnowledgeGraph& graph,
                                             const ReasonerModel& model,
                                             EntityId user,
                                             const UserProfile& profile,
                                             const std::vector<Pattern>& patterns,
                                             ReasoningStats* stats = nullptr);

struct Recommendation {
  EntityId item = kNoEntity;
  double score = 0.0;
  ReasoningPath path;  // best-scoring path reaching the item
};

// Keeps item-typed endpoints, deduplicates per item keeping the best path
// (score, then path log-probability as tiebreaker), optionally drops items
// the user already interacted with, and returns the top_n by score.
std::vector<Recommendation> recommend(const KnowledgeGraph& graph,
                                      const ReasonerModel& model, EntityId user,
                                      std::span<const ReasoningPath> paths,
                                      int top_n, bool exclude_train);

std::string format_path(const KnowledgeGraph& graph, const ReasoningPath& path);

void write_recommendations(const std::string& path, const KnowledgeGraph& graph,
                           const std::vector<std::pair<EntityId, std::vector<Recommendation>>>& recs,
                           const ArtifactHeader& header);

}  // namespace pathrec
