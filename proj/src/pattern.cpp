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

#include "pathrec/pattern.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "pathrec/rng.hpp"

namespace pathrec {

std::string pattern_name(const KnowledgeGraph& graph, const Pattern& p) {
  std::string out;
  for (std::size_t i = 0; i < p.relations.size(); ++i) {
    if (i) out += ',';
    out += graph.relation(p.relations[i]).name;
  }
  return out;
}

bool pattern_type_valid(const KnowledgeGraph& graph,
                        const std::vector<RelationId>& relations) {
  if (relations.empty()) return false;
  if (graph.relation(relations.front()).head_type != graph.user_type()) return false;
  if (graph.relation(relations.back()).tail_type != graph.item_type()) return false;
  for (std::size_t i = 0; i + 1 < relations.size(); ++i) {
    if (graph.relation(relations[i]).tail_type !=
        graph.relation(relations[i + 1]).head_type) {
      return false;
    }
  }
  return true;
}

std::uint64_t pattern_fingerprint(const std::vector<Pattern>& patterns) {
  Fnv1a f;
  f.add_u64(patterns.size());
  for (const Pattern& p : patterns) {
    f.add_u64(p.relations.size());
    for (RelationId r : p.relations) f.add_u32(r);
  }
  return f.value();
}

namespace {

// Outgoing edges of `e` across all relations, excluding already-visited
// entities; returned in (relation, entity) order for reproducibility.
std::vector<std::pair<RelationId, EntityId>> outgoing_edges(
    const KnowledgeGraph& graph, EntityId e,
    const std::vector<EntityId>& visited) {
  std::vector<std::pair<RelationId, EntityId>> out;
  for (RelationId r = 0; r < graph.num_relations(); ++r) {
    for (EntityId t : graph.neighbors(e, r)) {
      if (std::find(visited.begin(), visited.end(), t) == visited.end()) {
        out.emplace_back(r, t);
      }
    }
  }
  return out;
}

struct UserWalkCounts {
  std::map<std::vector<RelationId>, std::uint64_t> counts;
  std::uint64_t successes = 0;
};

}  // namespace

MiningResult mine_patterns(const KnowledgeGraph& graph,
                           const std::vector<InteractionPair>& train_pairs,
                           const MinerConfig& cfg) {
  if (cfg.max_length < 1) throw std::invalid_argument("max_length must be >= 1");

  // Pairs grouped per user so each user owns one generator.
  std::map<EntityId, std::size_t> pairs_per_user;
  for (const auto& [u, i] : train_pairs) ++pairs_per_user[u];
  std::vector<std::pair<EntityId, std::size_t>> users(pairs_per_user.begin(),
                                                      pairs_per_user.end());

  const TypeId item_type = graph.item_type();
  const RelationId rui = graph.interaction_relation();
  std::vector<UserWalkCounts> per_user(users.size());

  parallel_for(users.size(), cfg.threads, [&](std::size_t idx) {
    auto [user, n_pairs] = users[idx];
    Rng rng(mix_seed(cfg.seed, user, 0xA11CE));
    UserWalkCounts& local = per_user[idx];
    std::vector<EntityId> visited;
    std::vector<RelationId> rels;
    std::size_t n_walks = n_pairs * static_cast<std::size_t>(cfg.walks_per_pair);
    for (std::size_t w = 0; w < n_walks; ++w) {
      int target_len = 1 + static_cast<int>(rng.next_index(cfg.max_length));
      visited.assign(1, user);
      rels.clear();
      EntityId cur = user;
      bool dead = false;
      for (int t = 0; t < target_len; ++t) {
        auto edges = outgoing_edges(graph, cur, visited);
        if (edges.empty()) {
          dead = true;
          break;
        }
        auto [r, next] = edges[rng.next_index(edges.size())];
        rels.push_back(r);
        visited.push_back(next);
        cur = next;
      }
      if (dead || graph.entity_type(cur) != item_type) continue;
      if (rels.size() == 1 && rels[0] == rui) continue;  // trivial candidate
      ++local.counts[rels];
      ++local.successes;
    }
  });

  // Counts are integers, so merge order cannot change the result.
  std::map<std::vector<RelationId>, std::uint64_t> merged;
  std::uint64_t successes = 0;
  for (const auto& local : per_user) {
    successes += local.successes;
    for (const auto& [rels, c] : local.counts) merged[rels] += c;
  }

  std::vector<Pattern> all;
  all.reserve(merged.size());
  for (const auto& [rels, c] : merged) all.push_back(Pattern{rels, c});
  std::sort(all.begin(), all.end(), [](const Pattern& a, const Pattern& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.relations < b.relations;
  });

  MiningResult res;
  res.distinct_patterns = all.size();
  res.successful_walks = successes;
  if (all.empty()) {
    fmt::print(stderr, "[miner] warning: no user-centric walk succeeded; candidate set is empty\n");
  }
  if (all.size() > static_cast<std::size_t>(cfg.max_patterns)) {
    all.resize(cfg.max_patterns);
  }
  res.patterns = std::move(all);
  return res;
}

namespace {

// Depth-first enumeration of paths matching `relations` from `user`, ending
// in `targets`. Children are shuffled; collection stops at `cap` paths or
// once `budget` expansions were spent.
struct PathCollector {
  const KnowledgeGraph& graph;
  const std::vector<RelationId>& relations;
  const std::unordered_set<EntityId>& targets;
  int cap;
  std::size_t budget;
  Rng& rng;
  std::vector<ReasoningPath> found;
  std::vector<EntityId> stack;

  void dfs(EntityId cur, std::size_t depth) {
    if (static_cast<int>(found.size()) >= cap || budget == 0) return;
    if (depth == relations.size()) {
      if (targets.count(cur)) {
        ReasoningPath p;
        p.entities = stack;
        p.relations = relations;
        found.push_back(std::move(p));
      }
      return;
    }
    auto span = graph.neighbors(cur, relations[depth]);
    std::vector<EntityId> next(span.begin(), span.end());
    rng.shuffle(next);
    for (EntityId e : next) {
      if (static_cast<int>(found.size()) >= cap || budget == 0) return;
      if (std::find(stack.begin(), stack.end(), e) != stack.end()) continue;
      --budget;
      stack.push_back(e);
      dfs(e, depth + 1);
      stack.pop_back();
    }
  }
};

}  // namespace

SamplesByUser collect_training_paths(const KnowledgeGraph& graph,
                                     const std::vector<Pattern>& patterns,
                                     const std::vector<InteractionPair>& train_pairs,
                                     int per_user_cap, std::uint64_t seed,
                                     int threads) {
  if (patterns.empty()) throw std::invalid_argument("pattern set is empty");

  std::map<EntityId, std::unordered_set<EntityId>> train_items;
  for (const auto& [u, i] : train_pairs) train_items[u].insert(i);
  std::vector<EntityId> users;
  users.reserve(train_items.size());
  for (const auto& [u, _] : train_items) users.push_back(u);

  std::vector<std::vector<PathSample>> per_user(users.size());
  parallel_for(users.size(), threads, [&](std::size_t idx) {
    EntityId u = users[idx];
    const auto& targets = train_items.at(u);
    std::vector<PathSample>& out = per_user[idx];
    if (per_user_cap <= 0) return;
    for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
      Rng rng(mix_seed(seed, u, pi, 0xC0111EC7));
      PathCollector c{graph,
                      patterns[pi].relations,
                      targets,
                      per_user_cap,
                      static_cast<std::size_t>(per_user_cap) * 200 + 2000,
                      rng,
                      {},
                      {u}};
      c.dfs(u, 0);
      for (auto& p : c.found) {
        out.push_back(PathSample{static_cast<int>(pi), std::move(p)});
      }
    }
  });

  SamplesByUser result;
  for (std::size_t idx = 0; idx < users.size(); ++idx) {
    result.emplace(users[idx], std::move(per_user[idx]));
  }
  return result;
}

void write_patterns(const std::string& path, const KnowledgeGraph& graph,
                    const MiningResult& result, const ArtifactHeader& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  ArtifactHeader h = header;
  h["artifact"] = "patterns";
  h["distinct_patterns"] = std::to_string(result.distinct_patterns);
  h["successful_walks"] = std::to_string(result.successful_walks);
  out << format_artifact_header(h);
  for (std::size_t i = 0; i < result.patterns.size(); ++i) {
    out << fmt::format("{}\t{}\t{}\n", i + 1,
                       pattern_name(graph, result.patterns[i]),
                       result.patterns[i].frequency);
  }
}

std::vector<Pattern> read_patterns(const std::string& path,
                                   const KnowledgeGraph& graph,
                                   ArtifactHeader* header) {
  if (header) *header = parse_artifact_header(path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  std::vector<Pattern> patterns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tsv(line);
    if (f.size() != 3) {
      throw std::runtime_error(fmt::format("{}:{}: expected 3 fields", path, line_no));
    }
    Pattern p;
    std::string name;
    for (std::size_t i = 0; i <= f[1].size(); ++i) {
      if (i == f[1].size() || f[1][i] == ',') {
        RelationId r = graph.relation_id(name);
        if (r == kNoRelation) {
          throw std::runtime_error(
              fmt::format("{}:{}: unknown relation '{}'", path, line_no, name));
        }
        p.relations.push_back(r);
        name.clear();
      } else {
        name += f[1][i];
      }
    }
    p.frequency = std::stoull(f[2]);
    patterns.push_back(std::move(p));
  }
  return patterns;
}

}  // namespace pathrec
