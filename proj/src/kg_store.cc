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

#include "kgseek/kg_store.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "kgseek/errors.h"
#include "kgseek/relation_seq.h"

namespace kgseek {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// RelationSeq

RelationSeq::RelationSeq(std::vector<RelationId> rels) : rels_(std::move(rels)) {
  if (rels_.empty() || rels_.front() != kSelfRelation) {
    throw PreconditionError("relation sequence must start with self");
  }
}

RelationSeq RelationSeq::from_hops(std::span<const RelationId> hops) {
  std::vector<RelationId> rels{kSelfRelation};
  rels.insert(rels.end(), hops.begin(), hops.end());
  return RelationSeq(std::move(rels));
}

std::size_t RelationSeq::hops() const {
  return static_cast<std::size_t>(
      std::count_if(rels_.begin() + 1, rels_.end(), [](RelationId r) { return r != kSelfRelation; }));
}

std::vector<RelationId> RelationSeq::hop_relations() const {
  std::vector<RelationId> out;
  for (std::size_t i = 1; i < rels_.size(); ++i) {
    if (rels_[i] != kSelfRelation) out.push_back(rels_[i]);
  }
  return out;
}

RelationSeq RelationSeq::extended(RelationId r) const {
  RelationSeq next = *this;
  next.rels_.push_back(r);
  return next;
}

std::string RelationSeq::to_string(const KnowledgeGraph& g) const {
  std::string out;
  for (std::size_t i = 0; i < rels_.size(); ++i) {
    if (i > 0) out += ' ';
    out += g.relation_name(rels_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SymbolTable

std::string inverse_relation_name(std::string_view name) {
  if (name.size() > kInverseSuffix.size() && name.ends_with(kInverseSuffix)) {
    return std::string(name.substr(0, name.size() - kInverseSuffix.size()));
  }
  return std::string(name) + std::string(kInverseSuffix);
}

std::uint32_t SymbolTable::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> SymbolTable::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

KnowledgeGraph::KnowledgeGraph() {
  relations_.intern(kSelfRelationName);
  node_edge_begin_.push_back(0);
  node_rel_begin_.push_back(0);
}

const std::string& KnowledgeGraph::entity_name(EntityId id) const {
  check_entity(id);
  return entities_.name(id);
}

const std::string& KnowledgeGraph::relation_name(RelationId id) const {
  check_relation(id);
  return relations_.name(id);
}

EntityId KnowledgeGraph::entity_id(std::string_view name) const {
  if (auto id = entities_.find(name)) return *id;
  throw LookupError("unknown entity '" + std::string(name) + "'");
}

RelationId KnowledgeGraph::relation_id(std::string_view name) const {
  if (auto id = relations_.find(name)) return *id;
  throw LookupError("unknown relation '" + std::string(name) + "'");
}

void KnowledgeGraph::check_entity(EntityId id) const {
  if (id >= entities_.size()) {
    throw LookupError("entity id " + std::to_string(id) + " out of range (" +
                      std::to_string(entities_.size()) + " entities)");
  }
}

void KnowledgeGraph::check_relation(RelationId id) const {
  if (id >= relations_.size()) {
    throw LookupError("relation id " + std::to_string(id) + " out of range (" +
                      std::to_string(relations_.size()) + " relations)");
  }
}

std::span<const Triple> KnowledgeGraph::out_edges(EntityId v) const {
  check_entity(v);
  return std::span<const Triple>(edges_).subspan(
      node_edge_begin_[v], node_edge_begin_[v + 1] - node_edge_begin_[v]);
}

std::span<const EntityId> KnowledgeGraph::out_neighbors(EntityId v, RelationId r) const {
  check_entity(v);
  check_relation(r);
  if (r == kSelfRelation) throw PreconditionError("out_neighbors: self carries no edges");
  const std::size_t begin = node_rel_begin_[v];
  const std::size_t end = node_rel_begin_[v + 1];
  auto first = node_rels_.begin() + static_cast<std::ptrdiff_t>(begin);
  auto last = node_rels_.begin() + static_cast<std::ptrdiff_t>(end);
  auto it = std::lower_bound(first, last, r);
  if (it == last || *it != r) return {};
  const auto slot = static_cast<std::size_t>(it - node_rels_.begin());
  const std::size_t edge_begin = rel_edge_begin_[slot];
  const std::size_t edge_end = slot + 1 < end ? rel_edge_begin_[slot + 1] : node_edge_begin_[v + 1];
  return std::span<const EntityId>(objects_).subspan(edge_begin, edge_end - edge_begin);
}

std::span<const RelationId> KnowledgeGraph::outgoing_relations(EntityId v) const {
  check_entity(v);
  return std::span<const RelationId>(node_rels_).subspan(
      node_rel_begin_[v], node_rel_begin_[v + 1] - node_rel_begin_[v]);
}

std::vector<RelationId> KnowledgeGraph::outgoing_relations(const EntitySet& vs) const {
  // Marks over the (small) relation alphabet; output is ascending for free.
  std::vector<char> seen(relations_.size(), 0);
  std::size_t distinct = 0;
  const std::size_t max_distinct = relations_.size() - 1;
  bool done = false;
  vs.for_each([&](EntityId v) {
    if (done) {
      check_entity(v);
      return;
    }
    for (RelationId r : outgoing_relations(v)) {
      if (!seen[r]) {
        seen[r] = 1;
        if (++distinct == max_distinct) done = true;
      }
    }
  });
  std::vector<RelationId> out;
  out.reserve(distinct);
  for (RelationId r = 1; r < relations_.size(); ++r) {
    if (seen[r]) out.push_back(r);
  }
  return out;
}

bool KnowledgeGraph::has_edge(EntityId s, RelationId r, EntityId o) const {
  if (r == kSelfRelation) return false;
  auto objs = out_neighbors(s, r);
  return std::binary_search(objs.begin(), objs.end(), o);
}

std::string KnowledgeGraph::stats_line() const {
  std::ostringstream out;
  out << "entities=" << num_entities() << " relations=" << num_relations()
      << " edges=" << num_edges();
  return out.str();
}

// ---------------------------------------------------------------------------
// GraphBuilder

GraphBuilder::GraphBuilder(bool add_inverses) : add_inverses_(add_inverses) {
  relations_.intern(kSelfRelationName);
  inverse_of_.push_back(kSelfRelation);
}

EntityId GraphBuilder::add_entity(std::string_view name) { return entities_.intern(name); }

RelationId GraphBuilder::add_relation(std::string_view name) {
  if (name == kSelfRelationName) {
    throw PreconditionError("relation name 'self' is reserved");
  }
  const std::size_t before = relations_.size();
  const RelationId id = relations_.intern(name);
  if (relations_.size() == before) return id;
  inverse_of_.push_back(id);
  if (add_inverses_) {
    const RelationId inv = relations_.intern(inverse_relation_name(name));
    inverse_of_.resize(relations_.size(), inv);
    inverse_of_[id] = inv;
    inverse_of_[inv] = id;
  }
  return id;
}

void GraphBuilder::add_triple(std::string_view subject, std::string_view relation,
                              std::string_view object) {
  const EntityId s = add_entity(subject);
  const RelationId r = add_relation(relation);
  const EntityId o = add_entity(object);
  add_edge(s, r, o);
}

void GraphBuilder::add_edge(EntityId subject, RelationId relation, EntityId object) {
  if (relation == kSelfRelation || relation >= relations_.size()) {
    throw PreconditionError("add_edge: invalid relation id " + std::to_string(relation));
  }
  if (subject >= entities_.size() || object >= entities_.size()) {
    throw PreconditionError("add_edge: invalid entity id");
  }
  edges_.push_back({subject, relation, object});
  if (add_inverses_) edges_.push_back({object, inverse_of_[relation], subject});
}

KnowledgeGraph GraphBuilder::build() && {
  KnowledgeGraph g;
  g.entities_ = std::move(entities_);
  g.relations_ = std::move(relations_);
  g.has_inverses_ = add_inverses_;

  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  g.edges_ = std::move(edges_);

  const std::size_t n = g.entities_.size();
  g.objects_.resize(g.edges_.size());
  g.node_edge_begin_.assign(n + 1, 0);
  g.node_rel_begin_.assign(n + 1, 0);
  g.node_rels_.clear();
  g.rel_edge_begin_.clear();

  std::size_t e = 0;
  for (EntityId v = 0; v < n; ++v) {
    g.node_edge_begin_[v] = e;
    g.node_rel_begin_[v] = g.node_rels_.size();
    while (e < g.edges_.size() && g.edges_[e].subject == v) {
      const Triple& t = g.edges_[e];
      if (g.node_rels_.size() == g.node_rel_begin_[v] || g.node_rels_.back() != t.relation) {
        g.node_rels_.push_back(t.relation);
        g.rel_edge_begin_.push_back(e);
      }
      g.objects_[e] = t.object;
      ++e;
    }
  }
  g.node_edge_begin_[n] = e;
  g.node_rel_begin_[n] = g.node_rels_.size();

  std::uint64_t h = 1469598103934665603ull;
  for (const auto& name : g.entities_.names()) h = fnv1a(h, name.data(), name.size() + 1);
  for (const auto& name : g.relations_.names()) h = fnv1a(h, name.data(), name.size() + 1);
  for (const Triple& t : g.edges_) h = fnv1a(h, &t, sizeof(t));
  g.fingerprint_ = h;
  return g;
}

// ---------------------------------------------------------------------------
// Triple files

std::optional<TripleRecord> parse_triple_line(std::string_view line, std::size_t line_number) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::string_view stripped = trim(line);
  if (stripped.empty() || stripped.front() == '#') return std::nullopt;

  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos
                                                                      : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 3) {
    throw ParseError("expected 3 tab-separated fields, found " + std::to_string(fields.size()),
                     line_number);
  }
  TripleRecord record{std::string(trim(fields[0])), std::string(trim(fields[1])),
                      std::string(trim(fields[2]))};
  if (record.subject.empty() || record.relation.empty() || record.object.empty()) {
    throw ParseError("empty field in triple", line_number);
  }
  if (record.relation == kSelfRelationName) {
    throw ParseError("relation name 'self' is reserved", line_number);
  }
  return record;
}

KnowledgeGraph read_triples(std::istream& in, bool add_inverses) {
  GraphBuilder builder(add_inverses);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto record = parse_triple_line(line, line_number)) {
      builder.add_triple(record->subject, record->relation, record->object);
    }
  }
  return std::move(builder).build();
}

KnowledgeGraph load_triples(const std::string& path, bool add_inverses) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open triple file '" + path + "'");
  return read_triples(in, add_inverses);
}

void write_triples(const KnowledgeGraph& g, std::ostream& out) {
  for (const Triple& t : g.edges()) {
    if (g.has_inverses() && g.relation_name(t.relation).ends_with(kInverseSuffix)) continue;
    out << g.entity_name(t.subject) << '\t' << g.relation_name(t.relation) << '\t'
        << g.entity_name(t.object) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Induced subgraphs

std::optional<EntityId> Subgraph::to_local(EntityId original) const {
  auto it = std::lower_bound(to_original.begin(), to_original.end(), original);
  if (it == to_original.end() || *it != original) return std::nullopt;
  return static_cast<EntityId>(it - to_original.begin());
}

Subgraph induced_subgraph(const KnowledgeGraph& g, const EntitySet& nodes) {
  Subgraph sub;
  sub.to_original = nodes.to_vector();
  for (EntityId v : sub.to_original) g.check_entity(v);

  GraphBuilder builder(false);
  for (RelationId r = 1; r < g.num_relations(); ++r) builder.add_relation(g.relation_name(r));
  for (EntityId v : sub.to_original) builder.add_entity(g.entity_name(v));

  for (EntityId local = 0; local < sub.to_original.size(); ++local) {
    for (const Triple& t : g.out_edges(sub.to_original[local])) {
      if (auto o = sub.to_local(t.object)) builder.add_edge(local, t.relation, *o);
    }
  }
  sub.graph = std::move(builder).build();
  sub.graph.has_inverses_ = g.has_inverses();
  return sub;
}

}  // namespace kgseek
