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

// Test-only fixtures and independent oracles. The oracles are deliberately
// straight-line re-implementations (plain loops, no shared code with the
// library's math paths) used to pin expected values.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "pathrec/eval.hpp"
#include "pathrec/kg.hpp"
#include "pathrec/layout.hpp"
#include "pathrec/pattern.hpp"
#include "pathrec/profile.hpp"
#include "pathrec/reason.hpp"
#include "pathrec/reasoner.hpp"
#include "pathrec/rng.hpp"

namespace pathrec::testing {

inline bool bitwise_equal(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data());
}

inline bool bitwise_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
}

// --- canned graphs ----------------------------------------------------------

// user u0,u1; items i0,i1,i2; purchase edges u0-i0, u1-i0, u1-i1.
inline KnowledgeGraph chain_graph() {
  KnowledgeGraph g;
  TypeId user = g.add_type("user");
  TypeId item = g.add_type("item");
  g.add_relation("purchase", user, item);
  g.add_entity("u0", user);
  g.add_entity("u1", user);
  g.add_entity("i0", item);
  g.add_entity("i1", item);
  g.add_entity("i2", item);
  g.finalize_schema();
  g.add_triple(g.entity_id("u0"), 0, g.entity_id("i0"));
  g.add_triple(g.entity_id("u1"), 0, g.entity_id("i0"));
  g.add_triple(g.entity_id("u1"), 0, g.entity_id("i1"));
  return g;
}

// Product-catalog style schema with eight forward relations; the graph
// instantiates every type-valid user-centric pattern of length <= 3 except
// the bare interaction hop (15 of them).
inline KnowledgeGraph catalog_graph() {
  KnowledgeGraph g;
  TypeId user = g.add_type("user");
  TypeId item = g.add_type("item");
  TypeId word = g.add_type("word");
  TypeId cat = g.add_type("category");
  TypeId brand = g.add_type("brand");
  TypeId rp = g.add_type("related_product");
  g.add_relation("purchase", user, item);
  g.add_relation("mention", user, word);
  g.add_relation("described_by", item, word);
  g.add_relation("belongs_to", item, cat);
  g.add_relation("produced_by", item, brand);
  g.add_relation("also_bought", item, rp);
  g.add_relation("also_viewed", item, rp);
  g.add_relation("bought_together", item, rp);
  for (const char* t : {"u0", "u1"}) g.add_entity(t, user);
  for (const char* t : {"i0", "i1", "i2", "i3", "i4", "i5", "i6"}) {
    g.add_entity(t, item);
  }
  for (const char* t : {"w0", "w1"}) g.add_entity(t, word);
  g.add_entity("c0", cat);
  g.add_entity("b0", brand);
  g.add_entity("rp0", rp);
  g.finalize_schema();

  auto E = [&](const std::string& t) { return g.entity_id(t); };
  auto R = [&](const std::string& r) { return g.relation_id(r); };
  g.add_triple(E("u0"), R("purchase"), E("i0"));
  g.add_triple(E("u1"), R("purchase"), E("i0"));
  g.add_triple(E("u1"), R("purchase"), E("i2"));
  g.add_triple(E("u0"), R("mention"), E("w0"));
  g.add_triple(E("u1"), R("mention"), E("w0"));
  g.add_triple(E("i1"), R("described_by"), E("w0"));
  g.add_triple(E("i0"), R("described_by"), E("w1"));
  g.add_triple(E("i3"), R("described_by"), E("w1"));
  g.add_triple(E("i0"), R("belongs_to"), E("c0"));
  g.add_triple(E("i4"), R("belongs_to"), E("c0"));
  g.add_triple(E("i0"), R("produced_by"), E("b0"));
  g.add_triple(E("i5"), R("produced_by"), E("b0"));
  for (const char* rel : {"also_bought", "also_viewed", "bought_together"}) {
    g.add_triple(E("i0"), R(rel), E("rp0"));
    g.add_triple(E("i6"), R(rel), E("rp0"));
  }
  return g;
}

inline std::vector<InteractionPair> catalog_train_pairs(const KnowledgeGraph& g) {
  return {{g.entity_id("u0"), g.entity_id("i0")},
          {g.entity_id("u1"), g.entity_id("i0")},
          {g.entity_id("u1"), g.entity_id("i2")}};
}

inline Pattern make_pattern(const KnowledgeGraph& g,
                            const std::vector<std::string>& names,
                            std::uint64_t freq = 1) {
  Pattern p;
  for (const auto& n : names) p.relations.push_back(g.relation_id(n));
  p.frequency = freq;
  return p;
}

// --- independent oracles ----------------------------------------------------

// Plain-loop module forward: relu(relu([u;h] W1) W2) W3.
inline std::vector<double> oracle_module_forward(const ModuleWeights& w,
                                                 const std::vector<double>& u,
                                                 const std::vector<double>& h) {
  std::vector<double> x;
  x.insert(x.end(), u.begin(), u.end());
  x.insert(x.end(), h.begin(), h.end());
  auto matvec = [](const Mat& m, const std::vector<double>& in, bool relu) {
    std::vector<double> out(m.cols(), 0.0);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double acc = 0.0;
      for (Eigen::Index r = 0; r < m.rows(); ++r) acc += in[r] * m(r, c);
      out[c] = relu && acc < 0.0 ? 0.0 : acc;
    }
    return out;
  };
  auto a1 = matvec(w.w1, x, true);
  auto a2 = matvec(w.w2, a1, true);
  return matvec(w.w3, a2, false);
}

inline std::vector<double> oracle_embedding(const ReasonerModel& m, EntityId e) {
  std::vector<double> v(m.hp.dim);
  for (int j = 0; j < m.hp.dim; ++j) v[j] = m.entity_emb(e, j);
  return v;
}

// Straight-line softmax over the tail-type partition.
inline std::vector<double> oracle_next_hop_log_probs(
    const ReasonerModel& model, const KnowledgeGraph& graph, EntityId user,
    EntityId history, RelationId r, const std::vector<EntityId>& candidates) {
  auto phi = oracle_module_forward(model.module(r), oracle_embedding(model, user),
                                   oracle_embedding(model, history));
  const auto& part = graph.entities_of_type(graph.relation(r).tail_type);
  double z = 0.0;
  std::map<EntityId, double> score;
  for (EntityId e : part) {
    double s = 0.0;
    for (int j = 0; j < model.hp.dim; ++j) s += model.entity_emb(e, j) * phi[j];
    score[e] = s;
    z += std::exp(s);
  }
  std::vector<double> out;
  for (EntityId c : candidates) out.push_back(score.at(c) - std::log(z));
  return out;
}

inline double oracle_path_log_prob(const ReasonerModel& model,
                                   const KnowledgeGraph& graph,
                                   const ReasoningPath& path) {
  double total = 0.0;
  for (std::size_t t = 0; t < path.relations.size(); ++t) {
    total += oracle_next_hop_log_probs(model, graph, path.entities.front(),
                                       path.entities[t], path.relations[t],
                                       {path.entities[t + 1]})[0];
  }
  return total;
}

// All simple paths from `start` following the relation sequence.
inline std::vector<ReasoningPath> oracle_enumerate_paths(
    const KnowledgeGraph& graph, EntityId start,
    const std::vector<RelationId>& relations) {
  std::vector<ReasoningPath> out;
  ReasoningPath cur;
  cur.entities.push_back(start);
  std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
    if (depth == relations.size()) {
      ReasoningPath p = cur;
      p.relations = relations;
      out.push_back(std::move(p));
      return;
    }
    for (EntityId e : graph.neighbors(cur.entities.back(), relations[depth])) {
      if (std::find(cur.entities.begin(), cur.entities.end(), e) !=
          cur.entities.end()) {
        continue;
      }
      cur.entities.push_back(e);
      dfs(depth + 1);
      cur.entities.pop_back();
    }
  };
  dfs(0);
  return out;
}

// Exhaustive bounded-knapsack maximum of sum(w_j * v_j) subject to
// sum(w_j) == target, 0 <= w_j <= bounds_j, w_j == 0 where v_j is -inf;
// target = min(budget, total feasible capacity).
inline double oracle_knapsack_best(const std::vector<double>& values,
                                   const std::vector<int>& bounds, int budget) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  int capacity = 0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] != neg_inf && !std::isnan(values[j])) {
      capacity += std::max(0, bounds[j]);
    }
  }
  int target = std::min(budget, capacity);
  double best = neg_inf;
  std::function<void(std::size_t, int, double)> rec = [&](std::size_t j, int left,
                                                          double acc) {
    if (j == values.size()) {
      if (left == 0) best = std::max(best, acc);
      return;
    }
    int cap = values[j] == neg_inf || std::isnan(values[j])
                  ? 0
                  : std::min(left, std::max(0, bounds[j]));
    for (int w = 0; w <= cap; ++w) {
      rec(j + 1, left - w, acc + (w > 0 ? w * values[j] : 0.0));
    }
  };
  rec(0, target, 0.0);
  return target == 0 ? 0.0 : best;
}

inline double profile_objective(const UserProfile& p,
                                const std::vector<double>& values) {
  double acc = 0.0;
  for (const auto& e : p.entries) acc += e.weight * values[e.pattern_idx];
  return acc;
}

// Straight-line binary-relevance metrics.
inline MetricsAtK oracle_metrics(const std::vector<EntityId>& recommended,
                                 const std::unordered_set<EntityId>& relevant,
                                 int k) {
  int hits = 0;
  double dcg = 0.0;
  for (int pos = 0; pos < k && pos < static_cast<int>(recommended.size()); ++pos) {
    if (relevant.count(recommended[pos])) {
      ++hits;
      dcg += 1.0 / std::log2(pos + 2.0);
    }
  }
  double idcg = 0.0;
  for (int pos = 0; pos < k && pos < static_cast<int>(relevant.size()); ++pos) {
    idcg += 1.0 / std::log2(pos + 2.0);
  }
  MetricsAtK m;
  m.ndcg = idcg > 0 ? 100.0 * dcg / idcg : 0.0;
  m.recall = 100.0 * hits / static_cast<double>(relevant.size());
  m.hit_rate = hits > 0 ? 100.0 : 0.0;
  m.precision = 100.0 * hits / static_cast<double>(k);
  return m;
}

// Reference for the batched executor: enumerate every pattern-conforming
// extension at each tree node, then keep the per-path top-n_x by module
// score. Level-order, no shared computation with tree_reason beyond the
// model itself.
inline std::vector<ReasoningPath> oracle_guided_paths(
    const KnowledgeGraph& graph, const ReasonerModel& model, EntityId user,
    const UserProfile& profile, const std::vector<Pattern>& patterns) {
  LayoutTree tree = build_layout_tree(profile, patterns);
  std::vector<std::vector<double>> node_phi(tree.nodes.size());
  std::vector<std::vector<ReasoningPath>> node_paths(tree.nodes.size());
  node_phi[0] = oracle_embedding(model, user);
  ReasoningPath seed;
  seed.entities.push_back(user);
  node_paths[0].push_back(seed);
  std::vector<ReasoningPath> emitted;

  for (int x : tree.level_order()) {
    const LayoutNode& node = tree.nodes[x];
    if (node.emit) {
      for (const auto& p : node_paths[node.parent]) emitted.push_back(p);
      continue;
    }
    node_phi[x] =
        oracle_module_forward(model.module(node.relation),
                              oracle_embedding(model, user), node_phi[node.parent]);
    for (const auto& p : node_paths[node.parent]) {
      // All admissible extensions, then rank.
      std::vector<std::pair<double, EntityId>> scored;
      for (EntityId e : graph.neighbors(p.entities.back(), node.relation)) {
        if (std::find(p.entities.begin(), p.entities.end(), e) !=
            p.entities.end()) {
          continue;
        }
        double s = 0.0;
        for (int j = 0; j < model.hp.dim; ++j) {
          s += model.entity_emb(e, j) * node_phi[x][j];
        }
        scored.emplace_back(s, e);
      }
      std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
      if (scored.size() > static_cast<std::size_t>(node.count)) {
        scored.resize(node.count);
      }
      for (const auto& [s, e] : scored) {
        ReasoningPath np = p;
        np.relations.push_back(node.relation);
        np.entities.push_back(e);
        node_paths[x].push_back(np);
      }
    }
    if (node.pattern_idx >= 0) {
      for (const auto& p : node_paths[x]) emitted.push_back(p);
    }
  }
  return emitted;
}

// Canonical form for set comparison of path collections (scores ignored).
inline std::set<std::pair<std::vector<EntityId>, std::vector<RelationId>>>
path_set(const std::vector<ReasoningPath>& paths) {
  std::set<std::pair<std::vector<EntityId>, std::vector<RelationId>>> s;
  for (const auto& p : paths) s.insert({p.entities, p.relations});
  return s;
}

// --- finite differences ------------------------------------------------------

template <typename Fn>
void for_each_tensor(ReasonerModel& model, Fn&& fn) {
  fn("entity_emb", model.entity_emb);
  for (auto& [r, w] : model.modules) {
    fn("w1[" + std::to_string(r) + "]", w.w1);
    fn("w2[" + std::to_string(r) + "]", w.w2);
    fn("w3[" + std::to_string(r) + "]", w.w3);
  }
}

struct FdReport {
  double max_rel_err = 0.0;
  std::string worst_tensor;
};

// Central finite differences of total_loss against the analytic gradients,
// every element of every tensor.
inline FdReport fd_gradient_check(const ReasonerModel& model,
                                  const KnowledgeGraph& graph,
                                  const std::vector<TrainingExample>& batch,
                                  double eps = 1e-5) {
  Gradients analytic = Gradients::zeros_like(model);
  total_loss_backward(model, graph, batch, analytic);

  FdReport report;
  ReasonerModel work = model;
  auto loss_at = [&]() { return total_loss(work, graph, batch).total; };

  auto grad_of = [&](const std::string& name) -> Mat* {
    if (name == "entity_emb") return &analytic.d_entity_emb;
    auto open = name.find('[');
    RelationId r = std::stoul(name.substr(open + 1, name.size() - open - 2));
    ModuleWeights& mw = analytic.d_modules.at(r);
    if (name[1] == '1') return &mw.w1;
    if (name[1] == '2') return &mw.w2;
    return &mw.w3;
  };

  for_each_tensor(work, [&](const std::string& name, Mat& tensor) {
    const Mat* g = grad_of(name);
    for (Eigen::Index i = 0; i < tensor.rows(); ++i) {
      for (Eigen::Index j = 0; j < tensor.cols(); ++j) {
        double saved = tensor(i, j);
        double h = eps * std::max(1.0, std::abs(saved));
        tensor(i, j) = saved + h;
        double up = loss_at();
        tensor(i, j) = saved - h;
        double down = loss_at();
        tensor(i, j) = saved;
        double fd = (up - down) / (2.0 * h);
        double an = (*g)(i, j);
        double rel = std::abs(fd - an) / std::max(1.0, std::abs(fd) + std::abs(an));
        if (rel > report.max_rel_err) {
          report.max_rel_err = rel;
          report.worst_tensor = name;
        }
      }
    }
  });
  return report;
}

}  // namespace pathrec::testing
