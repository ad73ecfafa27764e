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

#include "pathrec/layout.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace pathrec {

std::vector<int> LayoutTree::level_order() const {
  std::vector<int> order;
  std::deque<int> queue(nodes[0].children.begin(), nodes[0].children.end());
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    order.push_back(x);
    for (int c : nodes[x].children) queue.push_back(c);
  }
  return order;
}

namespace {

int child_with_relation(const LayoutTree& tree, int node, RelationId r) {
  for (int c : tree.nodes[node].children) {
    if (!tree.nodes[c].emit && tree.nodes[c].relation == r) return c;
  }
  return -1;
}

int add_child(LayoutTree& tree, int parent, RelationId r, bool emit) {
  int idx = static_cast<int>(tree.nodes.size());
  LayoutNode n;
  n.relation = r;
  n.parent = parent;
  n.emit = emit;
  tree.nodes.push_back(n);
  auto& children = tree.nodes[parent].children;
  // Emit markers sort first, then by relation id.
  auto pos = std::find_if(children.begin(), children.end(), [&](int c) {
    const LayoutNode& o = tree.nodes[c];
    if (emit != o.emit) return !o.emit;
    return r < o.relation;
  });
  children.insert(pos, idx);
  return idx;
}

// Bottom-up count assignment, returning the node's resolved count.
int assign_counts(LayoutTree& tree, int node,
                  const std::vector<int>& pattern_weight) {
  LayoutNode& n = tree.nodes[node];
  if (n.children.empty()) {
    n.count = std::max(1, pattern_weight[n.pattern_idx]);
    return n.count;
  }
  int min_count = 0;
  for (int c : n.children) {
    int cc = assign_counts(tree, c, pattern_weight);
    min_count = min_count == 0 ? cc : std::min(min_count, cc);
  }
  n.count = min_count;
  for (int c : n.children) {
    tree.nodes[c].count = std::max(1, tree.nodes[c].count / n.count);
  }
  return n.count;
}

}  // namespace

LayoutTree build_layout_tree(const UserProfile& profile,
                             const std::vector<Pattern>& patterns) {
  if (profile.entries.empty()) {
    throw std::invalid_argument("build_layout_tree: empty profile");
  }
  LayoutTree tree;
  tree.nodes.push_back(LayoutNode{});  // root

  for (const ProfileEntry& entry : profile.entries) {
    const auto& rels = patterns.at(entry.pattern_idx).relations;
    if (rels.empty()) throw std::invalid_argument("empty pattern in profile");
    int cur = 0;
    for (std::size_t t = 0; t < rels.size(); ++t) {
      int next = child_with_relation(tree, cur, rels[t]);
      if (next < 0) next = add_child(tree, cur, rels[t], false);
      cur = next;
    }
    LayoutNode& end = tree.nodes[cur];
    if (end.children.empty() && end.pattern_idx < 0) {
      end.pattern_idx = entry.pattern_idx;
    } else {
      // The pattern ends where another pattern continues (or an identical
      // prefix already terminated): terminate it in an emit marker.
      int marker = add_child(tree, cur, kNoRelation, true);
      tree.nodes[marker].pattern_idx = entry.pattern_idx;
    }
  }

  // A previously terminal node may have gained children afterwards; migrate
  // its terminal role to an emit marker.
  for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].pattern_idx >= 0 && !tree.nodes[i].children.empty() &&
        !tree.nodes[i].emit) {
      int pattern = tree.nodes[i].pattern_idx;
      tree.nodes[i].pattern_idx = -1;
      int marker = add_child(tree, static_cast<int>(i), kNoRelation, true);
      tree.nodes[marker].pattern_idx = pattern;
    }
  }

  std::vector<int> weight_of(patterns.size(), 0);
  for (const ProfileEntry& e : profile.entries) weight_of[e.pattern_idx] = e.weight;
  for (int c : tree.nodes[0].children) assign_counts(tree, c, weight_of);
  tree.nodes[0].count = 1;
  return tree;
}

}  // namespace pathrec
