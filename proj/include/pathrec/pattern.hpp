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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pathrec/dataset.hpp"
#include "pathrec/kg.hpp"

namespace pathrec {

// Relation sequence of a user-centric path: first relation leaves the user
// type, last relation lands on the item type, adjacent relations chain.
struct Pattern {
  std::vector<RelationId> relations;
  std::uint64_t frequency = 0;

  bool operator==(const Pattern& o) const { return relations == o.relations; }
};

std::string pattern_name(const KnowledgeGraph& graph, const Pattern& p);
bool pattern_type_valid(const KnowledgeGraph& graph,
                        const std::vector<RelationId>& relations);

std::uint64_t pattern_fingerprint(const std::vector<Pattern>& patterns);

// One training path: a concrete walk from a user to one of their
// train-interacted items, instantiating patterns[pattern_idx].
struct PathSample {
  int pattern_idx = -1;
  ReasoningPath path;
};

using SamplesByUser = std::map<EntityId, std::vector<PathSample>>;

struct MinerConfig {
  int max_length = 3;       // H
  int max_patterns = 15;    // M
  int walks_per_pair = 10;
  std::uint64_t seed = 7;
  int threads = 1;
};

struct MiningResult {
  std::vector<Pattern> patterns;        // <= max_patterns, by frequency desc
  std::uint64_t distinct_patterns = 0;  // all distinct patterns observed
  std::uint64_t successful_walks = 0;
};

// Random-walk candidate mining. For every training pair, walks_per_pair
// walks start at the user; each walk draws a target length in [1, H],
// follows uniformly random outgoing edges without revisiting entities, and
// counts its relation sequence when it ends on an item. The bare
// interaction-relation sequence is not a candidate: a path consisting of the
// single interaction hop can only reach already-interacted items, so it is
// useless for recommendation. Ties in frequency break lexicographically.
MiningResult mine_patterns(const KnowledgeGraph& graph,
                           const std::vector<InteractionPair>& train_pairs,
                           const MinerConfig& cfg);

// Enumerates, per user, up to per_user_cap concrete paths per pattern that
// end at a train-interacted item of that user. Branch order is randomized by
// a per-(user, pattern) generator, so results do not depend on thread count.
SamplesByUser collect_training_paths(const KnowledgeGraph& graph,
                                     const std::vector<Pattern>& patterns,
                                     const std::vector<InteractionPair>& train_pairs,
                                     int per_user_cap, std::uint64_t seed,
                                     int threads = 1);

void write_patterns(const std::string& path, const KnowledgeGraph& graph,
                    const MiningResult& result, const ArtifactHeader& header);
std::vector<Pattern> read_patterns(const std::string& path,
                                   const KnowledgeGraph& graph,
                                   ArtifactHeader* header = nullptr);

}  // namespace pathrec
