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

#include "pathrec/kg.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <stdexcept>

namespace pathrec {

namespace {
const std::vector<EntityId> kEmptyList;
}

TypeId KnowledgeGraph::add_type(const std::string& name) {
  auto it = type_ids_.find(name);
  if (it != type_ids_.end()) return it->second;
  TypeId id = static_cast<TypeId>(type_names_.size());
  type_names_.push_back(name);
  type_ids_.emplace(name, id);
  by_type_.emplace_back();
  return id;
}

TypeId KnowledgeGraph::type_id(const std::string& name) const {
  auto it = type_ids_.find(name);
  return it == type_ids_.end() ? kNoType : it->second;
}

RelationId KnowledgeGraph::add_relation(const std::string& name, TypeId head,
                                        TypeId tail,
                                        const std::string& inverse_name) {
  if (relation_ids_.count(name)) {
    throw std::invalid_argument(fmt::format("duplicate relation '{}'", name));
  }
  if (head >= type_names_.size() || tail >= type_names_.size()) {
    throw std::invalid_argument(
        fmt::format("relation '{}' references unknown type", name));
  }
  std::string inv_name = inverse_name.empty() ? name + "_inv" : inverse_name;
  if (relation_ids_.count(inv_name)) {
    throw std::invalid_argument(
        fmt::format("duplicate relation '{}' (inverse of '{}')", inv_name, name));
  }
  RelationId fwd = static_cast<RelationId>(relations_.size());
  RelationId inv = fwd + 1;
  relations_.push_back(Relation{fwd, name, head, tail, inv, true});
  relations_.push_back(Relation{inv, inv_name, tail, head, fwd, false});
  relation_ids_.emplace(name, fwd);
  relation_ids_.emplace(inv_name, inv);
  adj_.emplace_back();
  adj_.emplace_back();
  return fwd;
}

RelationId KnowledgeGraph::relation_id(const std::string& name) const {
  auto it = relation_ids_.find(name);
  return it == relation_ids_.end() ? kNoRelation : it->second;
}

const Relation& KnowledgeGraph::relation(RelationId r) const {
  if (r >= relations_.size()) {
    throw std::out_of_range(fmt::format("unknown relation id {}", r));
  }
  return relations_[r];
}

EntityId KnowledgeGraph::add_entity(const std::string& token, TypeId type) {
  if (entity_ids_.count(token)) {
    throw std::invalid_argument(fmt::format("duplicate entity '{}'", token));
  }
  if (type >= type_names_.size()) {
    throw std::invalid_argument(
        fmt::format("entity '{}' references unknown type", token));
  }
  EntityId id = static_cast<EntityId>(entity_tokens_.size());
  entity_tokens_.push_back(token);
  entity_types_.push_back(type);
  entity_ids_.emplace(token, id);
  by_type_[type].push_back(id);
  return id;
}

EntityId KnowledgeGraph::entity_id(const std::string& token) const {
  auto it = entity_ids_.find(token);
  return it == entity_ids_.end() ? kNoEntity : it->second;
}

const std::vector<EntityId>& KnowledgeGraph::entities_of_type(TypeId t) const {
  if (t >= by_type_.size()) {
    throw std::out_of_range(fmt::format("unknown type id {}", t));
  }
  return by_type_[t];
}

bool KnowledgeGraph::insert_edge(EntityId h, RelationId r, EntityId t) {
  auto& list = adj_[r][h];
  auto it = std::lower_bound(list.begin(), list.end(), t);
  if (it != list.end() && *it == t) return false;
  list.insert(it, t);
  return true;
}

void KnowledgeGraph::add_triple(EntityId h, RelationId r, EntityId t) {
  const Relation& rel = relation(r);
  if (h >= num_entities() || t >= num_entities()) {
    throw std::out_of_range(fmt::format("triple ({}, {}, {}) uses unknown entity", h, r, t));
  }
  if (entity_type(h) != rel.head_type || entity_type(t) != rel.tail_type) {
    throw std::invalid_argument(fmt::format(
        "triple ({}, {}, {}) violates relation types: '{}' is {} -> {}, got {} -> {}",
        entity_token(h), rel.name, entity_token(t), rel.name,
        type_name(rel.head_type), type_name(rel.tail_type),
        type_name(entity_type(h)), type_name(entity_type(t))));
  }
  if (insert_edge(h, r, t)) ++directed_edges_;
  if (insert_edge(t, rel.inverse, h)) ++directed_edges_;
}

bool KnowledgeGraph::has_triple(EntityId h, RelationId r, EntityId t) const {
  auto list = neighbors(h, r);
  return std::binary_search(list.begin(), list.end(), t);
}

std::span<const EntityId> KnowledgeGraph::neighbors(EntityId e, RelationId r) const {
  if (e >= num_entities()) {
    throw std::out_of_range(fmt::format("unknown entity id {}", e));
  }
  if (r >= relations_.size()) {
    throw std::out_of_range(fmt::format("unknown relation id {}", r));
  }
  auto it = adj_[r].find(e);
  if (it == adj_[r].end()) return {kEmptyList.data(), 0};
  return {it->second.data(), it->second.size()};
}

void KnowledgeGraph::finalize_schema() {
  TypeId ut = type_id("user");
  TypeId it = type_id("item");
  if (ut == kNoType || it == kNoType) {
    throw std::runtime_error("schema must declare entity types 'user' and 'item'");
  }
  user_type_ = ut;
  item_type_ = it;
  RelationId found = kNoRelation;
  for (const Relation& rel : relations_) {
    if (!rel.declared) continue;
    if (rel.head_type == ut && rel.tail_type == it) {
      if (found != kNoRelation) {
        throw std::runtime_error(fmt::format(
            "ambiguous interaction relation: both '{}' and '{}' go user -> item",
            relations_[found].name, rel.name));
      }
      found = rel.id;
    }
  }
  if (found == kNoRelation) {
    throw std::runtime_error("schema declares no user -> item relation");
  }
  interaction_ = found;
}

RelationId KnowledgeGraph::interaction_relation() const {
  if (interaction_ == kNoRelation) {
    throw std::runtime_error("finalize_schema() has not run");
  }
  return interaction_;
}

TypeId KnowledgeGraph::user_type() const {
  if (user_type_ == kNoType) user_type_ = type_id("user");
  if (user_type_ == kNoType) throw std::runtime_error("no 'user' type");
  return user_type_;
}

TypeId KnowledgeGraph::item_type() const {
  if (item_type_ == kNoType) item_type_ = type_id("item");
  if (item_type_ == kNoType) throw std::runtime_error("no 'item' type");
  return item_type_;
}

bool KnowledgeGraph::is_valid_path(const ReasoningPath& p) const {
  if (p.entities.empty() || p.entities.size() != p.relations.size() + 1) return false;
  for (EntityId e : p.entities) {
    if (e >= num_entities()) return false;
  }
  if (entity_type(p.entities.front()) != user_type()) return false;
  for (std::size_t t = 0; t < p.relations.size(); ++t) {
    if (p.relations[t] >= relations_.size()) return false;
    if (!has_triple(p.entities[t], p.relations[t], p.entities[t + 1])) return false;
  }
  return true;
}

bool KnowledgeGraph::is_user_centric(const ReasoningPath& p) const {
  return is_valid_path(p) && !p.relations.empty() &&
         entity_type(p.entities.back()) == item_type();
}

GraphStats KnowledgeGraph::stats() const {
  GraphStats s;
  s.entities = num_entities();
  s.declared_relations = relations_.size() / 2;
  s.relations_with_inverses = relations_.size();
  s.directed_edges = directed_edges_;
  s.forward_triples = directed_edges_ / 2;
  TypeId ut = type_id("user");
  TypeId it = type_id("item");
  if (ut != kNoType) s.users = by_type_[ut].size();
  if (it != kNoType) s.items = by_type_[it].size();
  if (interaction_ != kNoRelation) {
    std::size_t n = 0;
    for (const auto& [e, list] : adj_[interaction_]) n += list.size();
    s.interactions = n;
  }
  return s;
}

std::vector<std::array<std::uint32_t, 3>> KnowledgeGraph::forward_triples() const {
  std::vector<std::array<std::uint32_t, 3>> out;
  out.reserve(directed_edges_ / 2);
  for (const Relation& rel : relations_) {
    if (!rel.declared) continue;
    std::vector<EntityId> heads;
    heads.reserve(adj_[rel.id].size());
    for (const auto& [e, list] : adj_[rel.id]) heads.push_back(e);
    std::sort(heads.begin(), heads.end());
    for (EntityId h : heads) {
      for (EntityId t : adj_[rel.id].at(h)) out.push_back({h, rel.id, t});
    }
  }
  return out;
}

std::uint64_t KnowledgeGraph::fingerprint() const {
  Fnv1a f;
  f.add_u64(type_names_.size());
  for (const auto& n : type_names_) f.add_string(n);
  f.add_u64(relations_.size());
  for (const Relation& r : relations_) {
    f.add_string(r.name);
    f.add_u32(r.head_type);
    f.add_u32(r.tail_type);
    f.add_u32(r.inverse);
  }
  f.add_u64(num_entities());
  for (EntityId e = 0; e < num_entities(); ++e) {
    f.add_string(entity_tokens_[e]);
    f.add_u32(entity_types_[e]);
  }
  for (const auto& t : forward_triples()) {
    f.add_u32(t[0]);
    f.add_u32(t[1]);
    f.add_u32(t[2]);
  }
  return f.value();
}

}  // namespace pathrec
