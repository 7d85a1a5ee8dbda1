// Copyright 2026 The kgseek Authors
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

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgseek/entity_set.h"

namespace kgseek {

inline constexpr std::string_view kSelfRelationName = "self";
inline constexpr std::string_view kInverseSuffix = "^-1";

struct Triple {
  EntityId subject;
  RelationId relation;
  EntityId object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleRecord {
  std::string subject;
  std::string relation;
  std::string object;
};

// "r" -> "r^-1", "r^-1" -> "r".
std::string inverse_relation_name(std::string_view name);

// Dense string <-> id interning in first-seen order.
class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }
  std::span<const std::string> names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// Immutable relation-typed directed graph. Edges are deduplicated and stored
// sorted by (subject, relation, object) in a CSR layout, so out_neighbors()
// and outgoing_relations() are contiguous slices.
class KnowledgeGraph {
 public:
  KnowledgeGraph();

  std::size_t num_entities() const { return entities_.size(); }
  // Includes the reserved self relation.
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  bool has_inverses() const { return has_inverses_; }

  const std::string& entity_name(EntityId id) const;
  const std::string& relation_name(RelationId id) const;
  std::span<const std::string> entity_names() const { return entities_.names(); }
  std::span<const std::string> relation_names() const { return relations_.names(); }

  std::optional<EntityId> find_entity(std::string_view name) const { return entities_.find(name); }
  std::optional<RelationId> find_relation(std::string_view name) const {
    return relations_.find(name);
  }
  // Throw LookupError naming the missing symbol.
  EntityId entity_id(std::string_view name) const;
  RelationId relation_id(std::string_view name) const;

  void check_entity(EntityId id) const;
  void check_relation(RelationId id) const;

  std::span<const Triple> edges() const { return edges_; }
  std::span<const Triple> out_edges(EntityId v) const;

  // Objects o with an edge (v, r, o), ascending. r must not be self.
  std::span<const EntityId> out_neighbors(EntityId v, RelationId r) const;
  // Relations with at least one outgoing edge from v, ascending.
  std::span<const RelationId> outgoing_relations(EntityId v) const;
  // Union over the set; never contains self.
  std::vector<RelationId> outgoing_relations(const EntitySet& vs) const;

  bool has_edge(EntityId s, RelationId r, EntityId o) const;

  // Content hash of the interning tables and edge list.
  std::uint64_t fingerprint() const { return fingerprint_; }

  // "entities=<n> relations=<n> edges=<n>"
  std::string stats_line() const;

 private:
  friend class GraphBuilder;
  friend struct Subgraph induced_subgraph(const KnowledgeGraph& g, const EntitySet& nodes);

  SymbolTable entities_;
  SymbolTable relations_;
  bool has_inverses_ = false;
  std::vector<Triple> edges_;
  std::vector<EntityId> objects_;             // parallel to edges_
  std::vector<std::size_t> node_edge_begin_;  // size num_entities + 1
  std::vector<RelationId> node_rels_;         // unique relations per node
  std::vector<std::size_t> node_rel_begin_;   // size num_entities + 1, into node_rels_
  std::vector<std::size_t> rel_edge_begin_;   // parallel to node_rels_, into edges_
  std::uint64_t fingerprint_ = 0;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(bool add_inverses = false);

  EntityId add_entity(std::string_view name);
  // Also registers the inverse when inverses are enabled.
  RelationId add_relation(std::string_view name);
  void add_triple(std::string_view subject, std::string_view relation, std::string_view object);
  // Ids must come from this builder. Adds the inverse edge when enabled.
  void add_edge(EntityId subject, RelationId relation, EntityId object);
  void reserve_edges(std::size_t n) { edges_.reserve(n); }

  std::size_t num_entities() const { return entities_.size(); }

  KnowledgeGraph build() &&;

 private:
  bool add_inverses_;
  SymbolTable entities_;
  SymbolTable relations_;
  std::vector<RelationId> inverse_of_;
  std::vector<Triple> edges_;
};

// Splits one triple line. Returns nullopt for blank and '#' comment lines.
// Throws ParseError when the line does not have exactly three non-empty
// tab-separated fields.
std::optional<TripleRecord> parse_triple_line(std::string_view line, std::size_t line_number);

KnowledgeGraph read_triples(std::istream& in, bool add_inverses);
KnowledgeGraph load_triples(const std::string& path, bool add_inverses);
// Graphs loaded with inverses omit the generated ^-1 edges, so reading the
// output back with inverses enabled restores the same edge set.
void write_triples(const KnowledgeGraph& g, std::ostream& out);

// The subgraph induced by a node set, with entities re-interned densely in
// ascending original-id order. The relation table is copied unchanged so
// relation ids agree with the parent graph.
struct Subgraph {
  KnowledgeGraph graph;
  std::vector<EntityId> to_original;

  std::optional<EntityId> to_local(EntityId original) const;
};

Subgraph induced_subgraph(const KnowledgeGraph& g, const EntitySet& nodes);

}  // namespace kgseek
