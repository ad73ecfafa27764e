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

#include "pathrec/dataset.hpp"
#include "pathrec/kg.hpp"
#include "pathrec/rng.hpp"
#include "pathrec/synth.hpp"
#include "support.hpp"

using namespace pathrec;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("pathrec_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

}  // namespace

TEST_CASE("add_triple stores the inverse edge") {
  KnowledgeGraph g = testing::chain_graph();
  RelationId p = g.relation_id("purchase");
  RelationId pinv = g.inverse(p);
  auto rev = g.neighbors(g.entity_id("i0"), pinv);
  REQUIRE(rev.size() == 2);
  CHECK(rev[0] == g.entity_id("u0"));
  CHECK(rev[1] == g.entity_id("u1"));
}

TEST_CASE("add_triple is idempotent") {
  KnowledgeGraph g = testing::chain_graph();
  std::size_t before = g.directed_edge_count();
  g.add_triple(g.entity_id("u0"), 0, g.entity_id("i0"));
  CHECK(g.directed_edge_count() == before);
  CHECK(g.neighbors(g.entity_id("u0"), 0).size() == 1);
}

TEST_CASE("add_triple rejects type mismatches naming the triple") {
  KnowledgeGraph g = testing::chain_graph();
  try {
    g.add_triple(g.entity_id("i0"), 0, g.entity_id("u0"));
    FAIL("expected std::invalid_argument");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("purchase") != std::string::npos);
    CHECK(msg.find("i0") != std::string::npos);
  }
}

TEST_CASE("neighbors returns sorted lists and empty when absent") {
  KnowledgeGraph g = testing::chain_graph();
  TypeId item = g.type_id("item");
  EntityId i3 = g.add_entity("i3", item);
  EntityId i4 = g.add_entity("i4", item);
  EntityId u0 = g.entity_id("u0");
  // Insert out of order; the list must come back ascending.
  g.add_triple(u0, 0, i4);
  g.add_triple(u0, 0, i3);
  auto list = g.neighbors(u0, 0);
  REQUIRE(list.size() == 3);
  CHECK(std::is_sorted(list.begin(), list.end()));

  CHECK(g.neighbors(g.entity_id("i2"), g.inverse(0)).empty());
  CHECK_THROWS_AS(g.neighbors(999, 0), std::out_of_range);
}

TEST_CASE("neighbors is stable across repeated calls") {
  KnowledgeGraph g = testing::chain_graph();
  auto a = g.neighbors(g.entity_id("u1"), 0);
  auto b = g.neighbors(g.entity_id("u1"), 0);
  CHECK(std::vector<EntityId>(a.begin(), a.end()) ==
        std::vector<EntityId>(b.begin(), b.end()));
}

TEST_CASE("inverse relation metadata is an involution") {
  KnowledgeGraph g = testing::catalog_graph();
  for (RelationId r = 0; r < g.num_relations(); ++r) {
    const Relation& rel = g.relation(r);
    CHECK(g.relation(rel.inverse).inverse == r);
    CHECK(g.relation(rel.inverse).head_type == rel.tail_type);
    CHECK(g.relation(rel.inverse).tail_type == rel.head_type);
  }
}

TEST_CASE("property: inverse symmetry holds for random triples") {
  KnowledgeGraph g;
  TypeId user = g.add_type("user");
  TypeId item = g.add_type("item");
  TypeId word = g.add_type("word");
  g.add_relation("purchase", user, item);
  g.add_relation("mention", user, word);
  for (int i = 0; i < 40; ++i) g.add_entity("u" + std::to_string(i), user);
  for (int i = 0; i < 40; ++i) g.add_entity("i" + std::to_string(i), item);
  for (int i = 0; i < 40; ++i) g.add_entity("w" + std::to_string(i), word);
  g.finalize_schema();

  Rng rng(123);
  std::size_t checked = 0;
  for (int n = 0; n < 10000; ++n) {
    bool purchase = rng.next_u64() & 1;
    EntityId h = static_cast<EntityId>(rng.next_index(40));
    EntityId t = static_cast<EntityId>(40 + (purchase ? 0 : 40) + rng.next_index(40));
    RelationId r = purchase ? 0 : 2;
    g.add_triple(h, r, t);
    CHECK(g.has_triple(t, g.inverse(r), h));
    ++checked;
  }
  CHECK(checked == 10000);
  // Full adjacency sweep: both directions of every stored edge line up.
  for (RelationId r = 0; r < g.num_relations(); ++r) {
    RelationId rinv = g.inverse(r);
    for (EntityId e = 0; e < g.num_entities(); ++e) {
      for (EntityId t : g.neighbors(e, r)) CHECK(g.has_triple(t, rinv, e));
    }
  }
}

TEST_CASE("path validator accepts stored walks and rejects others") {
  KnowledgeGraph g = testing::chain_graph();
  ReasoningPath ok;
  ok.entities = {g.entity_id("u0"), g.entity_id("i0"), g.entity_id("u1"),
                 g.entity_id("i1")};
  ok.relations = {0, g.inverse(0), 0};
  CHECK(g.is_valid_path(ok));
  CHECK(g.is_user_centric(ok));

  ReasoningPath bad = ok;
  bad.entities[3] = g.entity_id("i2");  // edge u1 -> i2 does not exist
  CHECK_FALSE(g.is_valid_path(bad));

  ReasoningPath item_start = ok;
  item_start.entities.erase(item_start.entities.begin());
  item_start.relations.erase(item_start.relations.begin());
  CHECK_FALSE(g.is_valid_path(item_start));  // starts at an item
}

TEST_CASE("finalize_schema demands exactly one interaction relation") {
  KnowledgeGraph g;
  TypeId user = g.add_type("user");
  TypeId item = g.add_type("item");
  g.add_relation("purchase", user, item);
  g.add_relation("rated", user, item);
  CHECK_THROWS_WITH_AS(g.finalize_schema(),
                       doctest::Contains("ambiguous interaction relation"),
                       std::runtime_error);

  KnowledgeGraph g2;
  g2.add_type("user");
  g2.add_type("item");
  CHECK_THROWS_AS(g2.finalize_schema(), std::runtime_error);
}

TEST_CASE("load_graph parses the tsv trio and counts edges") {
  auto dir = temp_dir("load");
  write_file(dir / "relations.tsv", "0\tpurchase\tuser\titem\n1\tmention\tuser\tword\n");
  write_file(dir / "entities.tsv", "u1\tuser\ni1\titem\nw1\tword\n");
  write_file(dir / "triples.tsv", "u1\t0\ti1\nu1\t1\tw1\n");

  KnowledgeGraph g = load_graph((dir / "entities.tsv").string(),
                                (dir / "relations.tsv").string(),
                                (dir / "triples.tsv").string());
  CHECK(g.num_entities() == 3);
  CHECK(g.directed_edge_count() == 4);  // 2 forward + 2 inverses
  GraphStats s = g.stats();
  CHECK(s.users == 1);
  CHECK(s.items == 1);
  CHECK(s.forward_triples == 2);
  CHECK(s.declared_relations == 2);

  // Three triples over two entities: 6 directed edges.
  write_file(dir / "entities.tsv", "u1\tuser\ni1\titem\n");
  write_file(dir / "relations.tsv", "0\tpurchase\tuser\titem\n");
  write_file(dir / "triples.tsv", "u1\t0\ti1\n");
  KnowledgeGraph g2 = load_graph((dir / "entities.tsv").string(),
                                 (dir / "relations.tsv").string(),
                                 (dir / "triples.tsv").string());
  CHECK(g2.num_entities() == 2);
  CHECK(g2.directed_edge_count() == 2);
}

TEST_CASE("load_graph reports malformed lines and dangling references") {
  auto dir = temp_dir("load_err");
  write_file(dir / "relations.tsv", "0\tpurchase\tuser\titem\n");
  write_file(dir / "entities.tsv", "u1\tuser\ni1\titem\n");

  write_file(dir / "triples.tsv", "u1\t0\ti1\nu1\tnope\n");
  CHECK_THROWS_WITH_AS(
      load_graph((dir / "entities.tsv").string(), (dir / "relations.tsv").string(),
                 (dir / "triples.tsv").string()),
      doctest::Contains("triples.tsv:2"), std::runtime_error);

  write_file(dir / "triples.tsv", "u1\t0\tix9\n");
  CHECK_THROWS_WITH_AS(
      load_graph((dir / "entities.tsv").string(), (dir / "relations.tsv").string(),
                 (dir / "triples.tsv").string()),
      doctest::Contains("ix9"), std::runtime_error);
}

TEST_CASE("loader rejects duplicate entities and out-of-order relation ids") {
  auto dir = temp_dir("load_dup");
  write_file(dir / "relations.tsv", "0\tpurchase\tuser\titem\n");
  write_file(dir / "entities.tsv", "u1\tuser\nu1\tuser\ni1\titem\n");
  write_file(dir / "triples.tsv", "");
  CHECK_THROWS_WITH_AS(
      load_graph((dir / "entities.tsv").string(), (dir / "relations.tsv").string(),
                 (dir / "triples.tsv").string()),
      doctest::Contains("duplicate entity"), std::runtime_error);

  write_file(dir / "entities.tsv", "u1\tuser\ni1\titem\n");
  write_file(dir / "relations.tsv", "1\tpurchase\tuser\titem\n");
  CHECK_THROWS_WITH_AS(
      load_graph((dir / "entities.tsv").string(), (dir / "relations.tsv").string(),
                 (dir / "triples.tsv").string()),
      doctest::Contains("line order"), std::runtime_error);
}

TEST_CASE("generator output round-trips through the loader") {
  SyntheticSpec spec;
  spec.users = 12;
  spec.items = 20;
  spec.interactions_per_user = 5;
  spec.seed = 99;
  auto dir = temp_dir("roundtrip");
  write_synthetic(generate_synthetic(spec), spec, dir.string());

  Dataset d1 = Dataset::load(dir.string());
  Dataset d2 = Dataset::load(dir.string());
  CHECK(d1.graph.fingerprint() == d2.graph.fingerprint());
  CHECK(d1.train == d2.train);
  CHECK(d1.test == d2.test);

  // Every triple line must be stored in adjacency.
  std::ifstream in(dir / "triples.tsv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tsv(line);
    REQUIRE(f.size() == 3);
    EntityId h = d1.graph.entity_id(f[0]);
    EntityId t = d1.graph.entity_id(f[2]);
    RelationId r = static_cast<RelationId>(std::stoul(f[1]) * 2);
    CHECK(d1.graph.has_triple(h, r, t));
    ++lines;
  }
  GraphStats s = d1.graph.stats();
  CHECK(s.forward_triples == lines + d1.train.size());
  CHECK(s.interactions == d1.train.size());
}
