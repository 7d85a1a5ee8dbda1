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

// Existential positive first-order queries over a knowledge graph: AST,
// disjunctive normal form, dependency-graph validation, a brute-force
// denotation oracle, and extraction of covering relation sequences.
//
// Text form (one query per line, optional tab-separated anchor bindings):
//
//   (select ?x (and (directed $gl ?v) (starred ?v ?x)))<TAB>gl=George_Lucas
//
//   query   := "(" "select" ?target formula ")"
//   formula := "(" "and" formula+ ")" | "(" "or" formula+ ")"
//            | "(" relation term term ")"
//   term    := $anchor | ?variable
//
// An anchor without a binding names the entity directly. Variables other than
// the target are existentially quantified. Universal quantification and
// negation are rejected.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgseek/entity_set.h"
#include "kgseek/kg_store.h"
#include "kgseek/relation_seq.h"

namespace kgseek {

using VarId = std::uint32_t;

enum class VarKind { kAnchor, kBound, kTarget };

struct Variable {
  std::string name;
  VarKind kind = VarKind::kBound;
  EntityId entity = 0;  // anchors only
};

// relation(subject, object)
struct Atom {
  RelationId relation = 0;
  VarId subject = 0;
  VarId object = 0;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Formula {
  enum class Kind { kAtom, kAnd, kOr };

  Kind kind = Kind::kAtom;
  Atom atom;
  std::vector<Formula> children;

  static Formula make_atom(Atom a) { return {Kind::kAtom, a, {}}; }
  static Formula make_and(std::vector<Formula> c) { return {Kind::kAnd, {}, std::move(c)}; }
  static Formula make_or(std::vector<Formula> c) { return {Kind::kOr, {}, std::move(c)}; }
};

struct EpfoQuery {
  std::vector<Variable> vars;
  VarId target = 0;
  Formula body;

  EntitySet anchor_entities() const;
};

struct Conjunct {
  std::vector<Atom> atoms;  // sorted, unique

  friend auto operator<=>(const Conjunct&, const Conjunct&) = default;
};

struct DnfQuery {
  std::vector<Variable> vars;
  VarId target = 0;
  std::vector<Conjunct> conjuncts;

  // Number of disjunctions.
  std::size_t n_or() const { return conjuncts.empty() ? 0 : conjuncts.size() - 1; }
  EntitySet anchor_entities() const;
};

// Distributes conjunction over disjunction. Atoms within a conjunct and the
// conjuncts themselves are sorted and deduplicated.
DnfQuery to_dnf(const EpfoQuery& q);

struct ValidityReport {
  bool valid = true;
  std::size_t conjunct = 0;  // first failing conjunct
  std::string reason;

  explicit operator bool() const { return valid; }
};

// Checks every conjunct's dependency graph: no atom relates a term to itself,
// the graph is acyclic, every source is an anchor, the target is the unique
// sink, and every bound variable lies on an anchor-to-target path.
ValidityReport validate(const KnowledgeGraph& g, const DnfQuery& q);

// Brute-force denotation: each entity is tried as the target and each
// conjunct is checked by exhaustive backtracking over bound variables.
EntitySet evaluate(const KnowledgeGraph& g, const DnfQuery& q);

// Denotation of the formula tree itself (no normalization), by enumerating
// joint assignments of every bound variable. Exponential; small graphs only.
EntitySet evaluate_formula(const KnowledgeGraph& g, const EpfoQuery& q);

// One covering sequence per conjunct (duplicates dropped): the relation labels
// along the lexicographically smallest anchor-to-target path of its
// dependency graph. Throws PreconditionError for invalid queries.
std::vector<RelationSeq> cover_sequences(const KnowledgeGraph& g, const DnfQuery& q);

// Valid DNF query with 1..max_conjuncts conjuncts of 1..max_atoms atoms each,
// built around sampled paths of `g` so the denotation is usually nonempty.
// Deterministic in `seed`.
DnfQuery random_query(const KnowledgeGraph& g, std::size_t max_conjuncts, std::size_t max_atoms,
                      std::uint64_t seed);

// Parsing and printing of the text form.
using AnchorBindings = std::vector<std::pair<std::string, std::string>>;

EpfoQuery parse_query(std::string_view text, const KnowledgeGraph& g,
                      const AnchorBindings& bindings = {});
// "<query>\t<name=entity,...>"; bindings are optional.
EpfoQuery parse_query_line(std::string_view line, const KnowledgeGraph& g);
std::string format_query(const DnfQuery& q, const KnowledgeGraph& g);

}  // namespace kgseek
