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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pathrec/dataset.hpp"
#include "pathrec/synth.hpp"
#include "support.hpp"

using namespace pathrec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("pathrec_synth_" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("every test pair is reachable through a planted pattern") {
  SyntheticSpec spec;
  spec.users = 10;
  spec.items = 20;
  spec.interactions_per_user = 5;
  spec.num_patterns = 3;
  spec.noise_rate = 0.0;
  spec.seed = 31;
  auto dir = fresh_dir("reach");
  write_synthetic(generate_synthetic(spec), spec, dir.string());
  Dataset d = Dataset::load(dir.string());

  auto patterns = planted_pattern_names(3);
  for (const auto& [u, i] : d.test) {
    bool reachable = false;
    for (const auto& names : patterns) {
      std::vector<RelationId> rels;
      for (const auto& n : names) rels.push_back(d.graph.relation_id(n));
      for (const auto& path : testing::oracle_enumerate_paths(d.graph, u, rels)) {
        if (path.entities.back() == i) {
          reachable = true;
          break;
        }
      }
      if (reachable) break;
    }
    CHECK(reachable);
  }
}

TEST_CASE("single-pattern spec keeps the guarantee") {
  SyntheticSpec spec;
  spec.users = 6;
  spec.items = 12;
  spec.interactions_per_user = 4;
  spec.num_patterns = 1;
  spec.noise_rate = 0.0;
  spec.seed = 8;
  SyntheticData data = generate_synthetic(spec);
  auto dir = fresh_dir("single");
  write_synthetic(data, spec, dir.string());
  Dataset d = Dataset::load(dir.string());
  std::vector<RelationId> rels = {d.graph.relation_id("mention"),
                                  d.graph.relation_id("describe_inv")};
  for (const auto& [u, i] : d.test) {
    bool hit = false;
    for (const auto& path : testing::oracle_enumerate_paths(d.graph, u, rels)) {
      if (path.entities.back() == i) hit = true;
    }
    CHECK(hit);
  }
}

TEST_CASE("fixed seed reproduces the files bit for bit") {
  SyntheticSpec spec;
  spec.users = 8;
  spec.items = 15;
  spec.interactions_per_user = 4;
  spec.seed = 77;
  auto dir_a = fresh_dir("det_a");
  auto dir_b = fresh_dir("det_b");
  write_synthetic(generate_synthetic(spec), spec, dir_a.string());
  write_synthetic(generate_synthetic(spec), spec, dir_b.string());
  for (const char* name : {"entities.tsv", "relations.tsv", "triples.tsv",
                           "train.tsv", "test.tsv", "ground_truth.tsv"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
}

TEST_CASE("noise rate scales the triple count") {
  SyntheticSpec spec;
  spec.users = 30;
  spec.items = 50;
  spec.interactions_per_user = 6;
  spec.seed = 3;
  spec.noise_rate = 0.0;
  SyntheticData clean = generate_synthetic(spec);
  spec.noise_rate = 0.3;
  SyntheticData noisy = generate_synthetic(spec);
  CHECK(clean.triples.size() == clean.planted_triples);
  double ratio = static_cast<double>(noisy.triples.size()) /
                 static_cast<double>(clean.triples.size());
  CHECK(ratio > 1.25);
  CHECK(ratio < 1.35);
}

TEST_CASE("ground truth log covers every interaction") {
  SyntheticSpec spec;
  spec.users = 7;
  spec.items = 14;
  spec.interactions_per_user = 4;
  spec.seed = 19;
  SyntheticData data = generate_synthetic(spec);
  std::set<std::pair<std::string, std::string>> logged;
  for (const auto& g : data.ground_truth) {
    logged.insert({g.user, g.item});
    CHECK((g.split == "train" || g.split == "test"));
    CHECK((g.role == "primary" || g.role == "backup"));
  }
  for (const auto& p : data.train) CHECK(logged.count(p) == 1);
  for (const auto& p : data.test) CHECK(logged.count(p) == 1);
}
