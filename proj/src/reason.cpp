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

#include "pathrec/reason.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace pathrec {

namespace {

// Admissible expansions of `path` under relation r: neighbors of the last
// entity, minus entities already on the path, ranked by <v, emb> descending
// with ties to the lower id; at most `limit` survivors.
std::vector<EntityId> top_neighbors(const KnowledgeGraph& graph,
                                    const ReasonerModel& model,
                                    const ReasoningPath& path, RelationId r,
                                    const Vec& v, int limit) {
  std::vector<std::pair<double, EntityId>> scored;
  for (EntityId e : graph.neighbors(path.entities.back(), r)) {
    if (std::find(path.entities.begin(), path.entities.end(), e) !=
        path.entities.end()) {
      continue;
    }
    scored.emplace_back(model.entity_emb.row(e).dot(v), e);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (scored.size() > static_cast<std::size_t>(limit)) scored.resize(limit);
  std::vector<EntityId> out;
  out.reserve(scored.size());
  for (const auto& [s, e] : scored) out.push_back(e);
  return out;
}

}  // namespace

std::vector<ReasoningPath> tree_reason(const KnowledgeGraph& graph,
                                       const ReasonerModel& model, EntityId user,
                                       const LayoutTree& tree,
                                       ReasoningStats* stats) {
  if (tree.empty()) return {};
  if (!graph.is_user(user)) {
    throw std::invalid_argument("tree_reason: start entity is not a user");
  }

  const std::size_t n_nodes = tree.nodes.size();
  std::vector<Vec> node_vec(n_nodes);
  std::vector<std::vector<ReasoningPath>> node_paths(n_nodes);

  Vec user_vec = model.entity_emb.row(user).transpose();
  node_vec[0] = user_vec;
  ReasoningPath seed;
  seed.entities.push_back(user);
  node_paths[0].push_back(seed);

  std::vector<ReasoningPath> emitted;
  auto emit = [&](ReasoningPath p, const Vec& final_vec) {
    p.score = model.entity_emb.row(p.entities.back()).dot(final_vec);
    if (stats) ++stats->emitted_paths;
    emitted.push_back(std::move(p));
  };

  for (int x : tree.level_order()) {
    const LayoutNode& node = tree.nodes[x];
    const auto& parent_paths = node_paths[node.parent];

    if (node.emit) {
      // Prefix pattern completed at the parent: its paths are already full
      // instances, scored against the parent's module output.
      for (const ReasoningPath& p : parent_paths) emit(p, node_vec[node.parent]);
      continue;
    }

    node_vec[x] = module_forward(model, node.relation, user_vec,
                                 node_vec[node.parent], stats);
    for (const ReasoningPath& p : parent_paths) {
      for (EntityId e :
           top_neighbors(graph, model, p, node.relation, node_vec[x], node.count)) {
        ReasoningPath np = p;
        np.relations.push_back(node.relation);
        np.entities.push_back(e);
        if (node.pattern_idx >= 0) {
          emit(std::move(np), node_vec[x]);
        } else {
          node_paths[x].push_back(std::move(np));
        }
      }
    }
  }
  return emitted;
}

std::vector<ReasoningPath> individual_reason(const KnowledgeGraph& graph,
                                             const ReasonerModel& model,
                                             EntityId user,
                                             const UserProfile& profile,
                                             const std::vector<Pattern>& patterns,
                                             ReasoningStats* stats) {
  if (profile.entries.empty()) return {};
  if (!graph.is_user(user)) {
    throw std::invalid_argument("individual_reason: start entity is not a user");
  }
  // Per-pattern expansion counts must match the merged tree exactly, so the
  // count schedule is taken from it; only the execution is unshared.
  LayoutTree tree = build_layout_tree(profile, patterns);

  struct Chain {
    std::vector<RelationId> relations;
    std::vector<int> counts;
  };
  // Collect root-to-terminal chains in the same level order the batched
  // executor emits.
  std::vector<Chain> chains;
  for (int x : tree.level_order()) {
    const LayoutNode& n = tree.nodes[x];
    if (n.pattern_idx < 0) continue;
    Chain c;
    for (int cur = n.emit ? n.parent : x; cur > 0; cur = tree.nodes[cur].parent) {
      c.relations.push_back(tree.nodes[cur].relation);
      c.counts.push_back(tree.nodes[cur].count);
    }
    std::reverse(c.relations.begin(), c.relations.end());
    std::reverse(c.counts.begin(), c.counts.end());
    chains.push_back(std::move(c));
  }

  Vec user_vec = model.entity_emb.row(user).transpose();
  std::vector<ReasoningPath> emitted;

  for (const Chain& chain : chains) {
    ReasoningPath seed;
    seed.entities.push_back(user);
    // Depth-first, one path at a time; the module chain is re-evaluated on
    // every branch instead of once per tree node.
    struct Frame {
      ReasoningPath path;
      Vec parent_vec;
      std::size_t depth;
    };
    std::vector<Frame> stack;
    stack.push_back(Frame{seed, user_vec, 0});
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      if (f.depth == chain.relations.size()) {
        f.path.score =
            model.entity_emb.row(f.path.entities.back()).dot(f.parent_vec);
        if (stats) ++stats->emitted_paths;
        emitted.push_back(std::move(f.path));
        continue;
      }
      Vec v = module_forward(model, chain.relations[f.depth], user_vec,
                             f.parent_vec, stats);
      auto next = top_neighbors(graph, model, f.path, chain.relations[f.depth], v,
                                chain.counts[f.depth]);
      // Reverse push keeps emission in rank order.
      for (auto it = next.rbegin(); it != next.rend(); ++it) {
        Frame nf;
        nf.path = f.path;
        nf.path.relations.push_back(chain.relations[f.depth]);
        nf.path.entities.push_back(*it);
        nf.parent_vec = v;
        nf.depth = f.depth + 1;
        stack.push_back(std::move(nf));
      }
    }
  }
  return emitted;
}

std::vector<Recommendation> recommend(const KnowledgeGraph& graph,
                                      const ReasonerModel& model, EntityId user,
                                      std::span<const ReasoningPath> paths,
                                      int top_n, bool exclude_train) {
  const TypeId item_type = graph.item_type();
  const RelationId rui = graph.interaction_relation();
  auto owned = graph.neighbors(user, rui);

  struct Scored {
    double score;
    double log_prob;
    const ReasoningPath* path;
  };
  std::map<EntityId, Scored> best;
  for (const ReasoningPath& p : paths) {
    if (p.entities.empty() || graph.entity_type(p.entities.back()) != item_type) {
      continue;
    }
    EntityId item = p.entities.back();
    if (exclude_train && std::binary_search(owned.begin(), owned.end(), item)) {
      continue;
    }
    double lp = path_log_prob(model, graph, p);
    auto it = best.find(item);
    if (it == best.end() || p.score > it->second.score ||
        (p.score == it->second.score && lp > it->second.log_prob)) {
      best[item] = Scored{p.score, lp, &p};
    }
  }

  std::vector<std::pair<EntityId, Scored>> ranked(best.begin(), best.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.score != b.second.score) return a.second.score > b.second.score;
    if (a.second.log_prob != b.second.log_prob) {
      return a.second.log_prob > b.second.log_prob;
    }
    return a.first < b.first;
  });
  if (ranked.size() > static_cast<std::size_t>(top_n)) ranked.resize(top_n);

  std::vector<Recommendation> out;
  out.reserve(ranked.size());
  for (const auto& [item, s] : ranked) {
    out.push_back(Recommendation{item, s.score, *s.path});
  }
  return out;
}

std::string format_path(const KnowledgeGraph& graph, const ReasoningPath& path) {
  std::string out = graph.entity_token(path.entities.front());
  for (std::size_t t = 0; t < path.relations.size(); ++t) {
    out += fmt::format("-[{}]->{}", graph.relation(path.relations[t]).name,
                       graph.entity_token(path.entities[t + 1]));
  }
  return out;
}

void write_recommendations(
    const std::string& path, const KnowledgeGraph& graph,
    const std::vector<std::pair<EntityId, std::vector<Recommendation>>>& recs,
    const ArtifactHeader& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  ArtifactHeader h = header;
  h["artifact"] = "recommendations";
  out << format_artifact_header(h);
  for (const auto& [user, list] : recs) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      out << fmt::format("{}\t{}\t{}\t{:.17g}\t{}\n", graph.entity_token(user),
                         k + 1, graph.entity_token(list[k].item), list[k].score,
                         format_path(graph, list[k].path));
    }
  }
}

}  // namespace pathrec
