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

#include "pathrec/dataset.hpp"

#include <fmt/core.h>

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace pathrec {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  return in;
}

[[noreturn]] void fail_at(const std::string& path, std::size_t line_no,
                          const std::string& what) {
  throw std::runtime_error(fmt::format("{}:{}: {}", path, line_no, what));
}

bool data_line(const std::string& line) {
  return !line.empty() && line[0] != '#';
}

std::uint64_t parse_uint(const std::string& path, std::size_t line_no,
                         const std::string& field) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || p != field.data() + field.size()) {
    fail_at(path, line_no, fmt::format("expected integer, got '{}'", field));
  }
  return v;
}

// Applies fn(line_no, fields) to every data line.
template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!data_line(line)) continue;
    fn(line_no, split_tsv(line));
  }
}

}  // namespace

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return out;
}

KnowledgeGraph load_graph(const std::string& entities_path,
                          const std::string& relations_path,
                          const std::string& triples_path) {
  KnowledgeGraph g;

  std::size_t expected_id = 0;
  for_each_line(relations_path, [&](std::size_t ln, const std::vector<std::string>& f) {
    if (f.size() != 4 && f.size() != 5) {
      fail_at(relations_path, ln, "expected 4 or 5 tab-separated fields");
    }
    std::uint64_t rid = parse_uint(relations_path, ln, f[0]);
    if (rid != expected_id) {
      fail_at(relations_path, ln,
              fmt::format("relation ids must follow line order; expected {}, got {}",
                          expected_id, rid));
    }
    ++expected_id;
    TypeId head = g.add_type(f[2]);
    TypeId tail = g.add_type(f[3]);
    try {
      g.add_relation(f[1], head, tail, f.size() == 5 ? f[4] : "");
    } catch (const std::invalid_argument& e) {
      fail_at(relations_path, ln, e.what());
    }
  });

  for_each_line(entities_path, [&](std::size_t ln, const std::vector<std::string>& f) {
    if (f.size() != 2) fail_at(entities_path, ln, "expected 2 tab-separated fields");
    TypeId t = g.add_type(f[1]);
    try {
      g.add_entity(f[0], t);
    } catch (const std::invalid_argument& e) {
      fail_at(entities_path, ln, e.what());
    }
  });

  for_each_line(triples_path, [&](std::size_t ln, const std::vector<std::string>& f) {
    if (f.size() != 3) fail_at(triples_path, ln, "expected 3 tab-separated fields");
    EntityId h = g.entity_id(f[0]);
    if (h == kNoEntity) fail_at(triples_path, ln, fmt::format("unknown entity '{}'", f[0]));
    EntityId t = g.entity_id(f[2]);
    if (t == kNoEntity) fail_at(triples_path, ln, fmt::format("unknown entity '{}'", f[2]));
    std::uint64_t rid = parse_uint(triples_path, ln, f[1]);
    if (rid * 2 >= g.num_relations()) {
      fail_at(triples_path, ln, fmt::format("unknown relation id {}", rid));
    }
    // File ids are declared-relation ranks; internally forward ids are even.
    RelationId r = static_cast<RelationId>(rid * 2);
    try {
      g.add_triple(h, r, t);
    } catch (const std::invalid_argument& e) {
      fail_at(triples_path, ln, e.what());
    }
  });

  g.finalize_schema();
  return g;
}

std::vector<InteractionPair> load_pairs(const KnowledgeGraph& graph,
                                        const std::string& path) {
  std::vector<InteractionPair> pairs;
  for_each_line(path, [&](std::size_t ln, const std::vector<std::string>& f) {
    if (f.size() != 2) fail_at(path, ln, "expected 2 tab-separated fields");
    EntityId u = graph.entity_id(f[0]);
    if (u == kNoEntity) fail_at(path, ln, fmt::format("unknown entity '{}'", f[0]));
    EntityId i = graph.entity_id(f[1]);
    if (i == kNoEntity) fail_at(path, ln, fmt::format("unknown entity '{}'", f[1]));
    if (!graph.is_user(u)) fail_at(path, ln, fmt::format("'{}' is not a user", f[0]));
    if (!graph.is_item(i)) fail_at(path, ln, fmt::format("'{}' is not an item", f[1]));
    pairs.emplace_back(u, i);
  });
  return pairs;
}

void add_interactions(KnowledgeGraph& graph,
                      const std::vector<InteractionPair>& pairs) {
  RelationId rui = graph.interaction_relation();
  for (const auto& [u, i] : pairs) graph.add_triple(u, rui, i);
}

Dataset Dataset::load(const std::string& dir) {
  Dataset d;
  d.graph = load_graph(dir + "/entities.tsv", dir + "/relations.tsv",
                       dir + "/triples.tsv");
  d.train = load_pairs(d.graph, dir + "/train.tsv");
  d.test = load_pairs(d.graph, dir + "/test.tsv");
  add_interactions(d.graph, d.train);
  return d;
}

std::string format_artifact_header(const ArtifactHeader& header) {
  std::string out;
  for (const auto& [k, v] : header) {
    out += fmt::format("# {}\t{}\n", k, v);
  }
  return out;
}

ArtifactHeader parse_artifact_header(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  ArtifactHeader h;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] != '#') break;
    std::string body = line.substr(1);
    if (!body.empty() && body.front() == ' ') body.erase(body.begin());
    auto tab = body.find('\t');
    if (tab == std::string::npos) continue;
    h[body.substr(0, tab)] = body.substr(tab + 1);
  }
  return h;
}

}  // namespace pathrec
