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

#include <vector>

#include "pathrec/profile.hpp"

namespace pathrec {

// Prefix-merged tree over the profile's patterns. Each non-root node carries
// a relation; every root-to-leaf relation sequence is a profile pattern.
// Counts schedule how many expansions happen per incoming path at each node:
//   - leaves start at their pattern weight,
//   - an internal node takes the minimum over its children, after which each
//     child is refreshed to floor(child / node), clamped to >= 1,
//   - the root is fixed at 1 and leaves its children unrefreshed.
// When one pattern is a proper prefix of another, the shorter pattern ends
// in an emit node: a childless marker that completes paths at that depth
// without consuming a graph hop.
struct LayoutNode {
  RelationId relation = kNoRelation;  // kNoRelation for root and emit nodes
  int count = 1;                      // n_x
  int parent = -1;
  std::vector<int> children;          // indices, ordered by relation id
  int pattern_idx = -1;               // >= 0 when a pattern ends here
  bool emit = false;                  // emit marker node
};

struct LayoutTree {
  std::vector<LayoutNode> nodes;  // nodes[0] is the root

  bool empty() const { return nodes.size() <= 1; }
  // Node indices in level order (root excluded).
  std::vector<int> level_order() const;
};

// Throws std::invalid_argument on an empty profile.
LayoutTree build_layout_tree(const UserProfile& profile,
                             const std::vector<Pattern>& patterns);

}  // namespace pathrec
