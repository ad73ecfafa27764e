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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pathrec/common.hpp"

namespace pathrec {

// Typed heterogeneous graph with explicit inverse relations.
//
// Design notes:
// - Entity / relation / type ids are dense integers assigned in insertion
//   (i.e. file) order, so runs are reproducible and adjacency is an array.
// - Every declared relation r gets a companion inverse relation; storing a
//   triple (h, r, t) always stores (t, r~, h) as well.
// - Adjacency is keyed by (entity, relation) because traversal always asks
//   for one fixed relation at a time.
// - Lists are kept sorted and duplicate-free; after construction the graph
//   is immutable and safe for any number of concurrent readers.
//
// The type names "user" and "item" are reserved: they identify the user and
// item partitions, and exactly one declared relation must go user -> item
// (the interaction relation).

struct Relation {
  RelationId id = kNoRelation;
  std::string name;
  TypeId head_type = kNoType;
  TypeId tail_type = kNoType;
  RelationId inverse = kNoRelation;
  bool declared = false;  // false for auto-generated inverses
};

// Walk of alternating entities and relations; entities has one more element
// than relations. A path is user-centric when it starts at a user entity and
// ends at an item entity.
struct ReasoningPath {
  std::vector<EntityId> entities;
  std::vector<RelationId> relations;
  double score = 0.0;

  bool operator==(const ReasoningPath& o) const {
    return entities == o.entities && relations == o.relations;
  }
};

struct GraphStats {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t entities = 0;
  std::size_t declared_relations = 0;
  std::size_t relations_with_inverses = 0;
  std::size_t interactions = 0;      // stored edges of the interaction relation
  std::size_t forward_triples = 0;   // declared-relation edges
  std::size_t directed_edges = 0;    // including inverses
};

class KnowledgeGraph {
 public:
  // --- schema -------------------------------------------------------------
  TypeId add_type(const std::string& name);
  TypeId type_id(const std::string& name) const;  // kNoType when missing
  const std::string& type_name(TypeId t) const { return type_names_.at(t); }
  std::size_t num_types() const { return type_names_.size(); }

  // Declares a forward relation plus its inverse. The inverse is named
  // `name + "_inv"` unless an explicit inverse_name is given.
  RelationId add_relation(const std::string& name, TypeId head, TypeId tail,
                          const std::string& inverse_name = "");
  RelationId relation_id(const std::string& name) const;  // kNoRelation if missing
  const Relation& relation(RelationId r) const;
  std::size_t num_relations() const { return relations_.size(); }
  RelationId inverse(RelationId r) const { return relation(r).inverse; }

  // --- entities -----------------------------------------------------------
  EntityId add_entity(const std::string& token, TypeId type);
  EntityId entity_id(const std::string& token) const;  // kNoEntity if missing
  const std::string& entity_token(EntityId e) const { return entity_tokens_.at(e); }
  TypeId entity_type(EntityId e) const { return entity_types_.at(e); }
  std::size_t num_entities() const { return entity_types_.size(); }
  const std::vector<EntityId>& entities_of_type(TypeId t) const;

  // --- triples ------------------------------------------------------------
  // Stores (h, r, t) and its inverse. Idempotent on duplicates. Throws
  // std::invalid_argument when h/t types do not match the relation.
  void add_triple(EntityId h, RelationId r, EntityId t);
  bool has_triple(EntityId h, RelationId r, EntityId t) const;

  // All e' with (e, r, e') stored, ascending; empty when none.
  std::span<const EntityId> neighbors(EntityId e, RelationId r) const;

  std::size_t directed_edge_count() const { return directed_edges_; }

  // --- interaction relation / user-item machinery --------------------------
  // Resolves the unique declared user->item relation. Throws when the schema
  // does not contain exactly one candidate.
  void finalize_schema();
  RelationId interaction_relation() const;
  TypeId user_type() const;
  TypeId item_type() const;
  bool is_user(EntityId e) const { return entity_type(e) == user_type(); }
  bool is_item(EntityId e) const { return entity_type(e) == item_type(); }

  // --- validation ---------------------------------------------------------
  // Structural check used on every emitted path: shape, typed first entity,
  // and each hop present in adjacency.
  bool is_valid_path(const ReasoningPath& p) const;
  // Valid and ends at an item entity.
  bool is_user_centric(const ReasoningPath& p) const;

  GraphStats stats() const;

  // Fingerprint of schema + canonical triple list; identifies the graph in
  // downstream artifacts.
  std::uint64_t fingerprint() const;

  // Canonical (sorted) forward triples; used by pretraining and hashing.
  std::vector<std::array<std::uint32_t, 3>> forward_triples() const;

 private:
  std::vector<std::string> type_names_;
  std::unordered_map<std::string, TypeId> type_ids_;

  std::vector<std::string> entity_tokens_;
  std::vector<TypeId> entity_types_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::vector<std::vector<EntityId>> by_type_;

  std::vector<Relation> relations_;
  std::unordered_map<std::string, RelationId> relation_ids_;

  // adj_[r] : entity -> sorted neighbor list.
  std::vector<std::unordered_map<EntityId, std::vector<EntityId>>> adj_;
  std::size_t directed_edges_ = 0;

  RelationId interaction_ = kNoRelation;
  mutable TypeId user_type_ = kNoType;
  mutable TypeId item_type_ = kNoType;

  // Inserts t into the (h, r) list, keeping it sorted; returns false when the
  // edge was already present.
  bool insert_edge(EntityId h, RelationId r, EntityId t);
};

}  // namespace pathrec
