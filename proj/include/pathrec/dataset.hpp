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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pathrec/kg.hpp"

namespace pathrec {

// TSV dataset layout (one directory):
//   entities.tsv   entity_id <TAB> type_name
//   relations.tsv  relation_id <TAB> name <TAB> head_type <TAB> tail_type
//                  [<TAB> inverse_name]          (relation_id = line order)
//   triples.tsv    head_id <TAB> relation_id <TAB> tail_id   (forward only)
//   train.tsv      user_id <TAB> item_id
//   test.tsv       user_id <TAB> item_id
//
// Lines starting with '#' are ignored everywhere. Malformed lines and
// dangling references raise std::runtime_error carrying file:line.

using InteractionPair = std::pair<EntityId, EntityId>;

KnowledgeGraph load_graph(const std::string& entities_path,
                          const std::string& relations_path,
                          const std::string& triples_path);

// Reads user/item pairs, validating entity types against the graph.
std::vector<InteractionPair> load_pairs(const KnowledgeGraph& graph,
                                        const std::string& path);

// Inserts pairs as interaction-relation triples.
void add_interactions(KnowledgeGraph& graph,
                      const std::vector<InteractionPair>& pairs);

struct Dataset {
  KnowledgeGraph graph;  // includes the train interactions
  std::vector<InteractionPair> train;
  std::vector<InteractionPair> test;

  // Loads entities/relations/triples/train/test from `dir`.
  static Dataset load(const std::string& dir);
};

// Key/value header lines ("# key<TAB>value") carried at the top of every
// TSV artifact; used for config / fingerprint validation between stages.
using ArtifactHeader = std::map<std::string, std::string>;

std::string format_artifact_header(const ArtifactHeader& header);
// Consumes leading '#' lines of an already-open artifact body.
ArtifactHeader parse_artifact_header(const std::string& path);

// Splits a data line on tabs (trailing '\r' stripped).
std::vector<std::string> split_tsv(const std::string& line);

}  // namespace pathrec
