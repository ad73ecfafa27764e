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
#include <string>
#include <vector>

#include "pathrec/dataset.hpp"

namespace pathrec {

// Planted-structure benchmark generator.
//
// Schema: entity types user/item/word/brand/related; relations
//   purchase     user -> item   (the interaction relation)
//   mention      user -> word
//   describe     item -> word
//   likes        user -> brand
//   produced_by  item -> brand
//   also_bought  item -> related
//   browsed      user -> related
//
// Up to three patterns are planted, each rooted at its own relation so
// their layout subtrees do not interfere and no module is shared with the
// co-purchase pattern that emerges organically:
//   0: mention, describe_inv
//   1: browsed, also_bought_inv
//   2: likes, produced_by_inv
//
// Every user gets a dominant pattern (user index mod num_patterns) drawn
// with probability dominant_prob per interaction; each interaction is
// planted by materializing its connecting edges through one fresh word /
// related / brand entity, keeping the second hop unambiguous. Interactions
// split 70/30 into train/test per user; a backup_fraction share of the test
// pairs is additionally planted through the user's best-evidenced other
// pattern when backup_plant_test is set. Every test pair stays reachable
// from its user through at least one planted pattern by construction.
struct SyntheticSpec {
  int users = 200;
  int items = 300;
  int interactions_per_user = 10;
  double test_fraction = 0.3;
  int num_patterns = 3;  // 1..3, prefix of the list above
  double dominant_prob = 0.9;
  double noise_rate = 0.1;  // extra fresh-entity edges per stored edge
  bool backup_plant_test = true;
  double backup_fraction = 0.35;  // share of test pairs that get the backup
  std::uint64_t seed = 7;
};

struct GroundTruthEntry {
  std::string user;
  std::string item;
  std::string pattern;  // comma-joined relation names
  std::string split;    // "train" | "test"
  std::string role;     // "primary" | "backup"
};

struct SyntheticData {
  // entity token, type name; in id order
  std::vector<std::pair<std::string, std::string>> entities;
  // head token, file relation id, tail token (forward, non-interaction)
  std::vector<std::tuple<std::string, int, std::string>> triples;
  std::vector<std::pair<std::string, std::string>> train;
  std::vector<std::pair<std::string, std::string>> test;
  std::vector<GroundTruthEntry> ground_truth;
  std::size_t planted_triples = 0;  // triples before noise was added
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Writes entities/relations/triples/train/test/ground_truth.tsv plus
// synthetic.json (the spec) into dir, creating it if needed.
void write_synthetic(const SyntheticData& data, const SyntheticSpec& spec,
                     const std::string& dir);

// Relation-name sequences of the planted patterns, in plant order.
std::vector<std::vector<std::string>> planted_pattern_names(int num_patterns);

}  // namespace pathrec
