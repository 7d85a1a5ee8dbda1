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


#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kgseek/coalesce.h"
#include "kgseek/epfo.h"
#include "kgseek/errors.h"
#include "oracle/oracle.h"
#include "test_graphs.h"

namespace kgseek {
namespace {

using testing::film_graph;
using testing::ids;
using testing::seq;

DnfQuery dnf(const char* text, const KnowledgeGraph& g) { return to_dnf(parse_query(text, g)); }

constexpr const char* kWhoStarred = "(select ?x (and (directed $GL ?v) (starred ?v ?x)))";

TEST(ToDnf, SingleConjunction) {
  KnowledgeGraph g = film_graph();
  DnfQuery q = dnf(kWhoStarred, g);
  EXPECT_EQ(q.conjuncts.size(), 1u);
  EXPECT_EQ(q.n_or(), 0u);
  EXPECT_EQ(q.conjuncts[0].atoms.size(), 2u);
}

// Hand-built formulas over atoms A..D with explicit ids, so the expected
// conjuncts can be written out directly.
struct AtomFixture {
  std::vector<Variable> vars{{"a", VarKind::kAnchor, 0}, {"x", VarKind::kTarget, 0}};
  Atom A{1, 0, 1}, B{2, 0, 1}, C{3, 0, 1}, D{4, 0, 1};
  EpfoQuery query(Formula body) const { return {vars, 1, std::move(body)}; }
};

Formula atom(Atom a) { return Formula::make_atom(a); }

TEST(ToDnf, DistributesAndOverOr) {
  AtomFixture f;
  DnfQuery q = to_dnf(f.query(Formula::make_and(
      {Formula::make_or({atom(f.A), atom(f.B)}), atom(f.C)})));
  ASSERT_EQ(q.conjuncts.size(), 2u);
  EXPECT_EQ(q.conjuncts[0].atoms, (std::vector<Atom>{f.A, f.C}));
  EXPECT_EQ(q.conjuncts[1].atoms, (std::vector<Atom>{f.B, f.C}));

  DnfQuery four = to_dnf(f.query(Formula::make_and(
      {Formula::make_or({atom(f.A), atom(f.B)}), Formula::make_or({atom(f.C), atom(f.D)})})));
  ASSERT_EQ(four.conjuncts.size(), 4u);
  EXPECT_EQ(four.n_or(), 3u);
  EXPECT_EQ(four.conjuncts[0].atoms, (std::vector<Atom>{f.A, f.C}));
  EXPECT_EQ(four.conjuncts[3].atoms, (std::vector<Atom>{f.B, f.D}));
}

// Random and/or trees over atoms between one anchor, two bound variables and
// the target. The formula evaluator enumerates joint assignments directly,
// so it is an independent check of the normal form.
Formula random_formula(std::mt19937_64& rng, std::size_t n_rel, int depth) {
  if (depth == 0 || rng() % 3 == 0) {
    static const std::pair<VarId, VarId> kShapes[] = {{0, 1}, {0, 2}, {1, 3}, {2, 3},
                                                      {0, 3}, {1, 2}};
    const auto& s = kShapes[rng() % 6];
    return atom({static_cast<RelationId>(1 + rng() % n_rel), s.first, s.second});
  }
  std::vector<Formula> kids;
  const int n = 2 + static_cast<int>(rng() % 2);
  for (int i = 0; i < n; ++i) kids.push_back(random_formula(rng, n_rel, depth - 1));
  return rng() % 2 ? Formula::make_and(std::move(kids)) : Formula::make_or(std::move(kids));
}

TEST(ToDnf, PreservesDenotation) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    KnowledgeGraph g = oracle::random_graph(9, 3, 30, seed);
    std::mt19937_64 rng(seed);
    EpfoQuery q;
    q.vars = {{"a", VarKind::kAnchor, static_cast<EntityId>(rng() % 9)},
              {"u", VarKind::kBound, 0},
              {"w", VarKind::kBound, 0},
              {"x", VarKind::kTarget, 0}};
    q.target = 3;
    q.body = random_formula(rng, g.num_relations() - 1, 3);
    EXPECT_EQ(evaluate(g, to_dnf(q)), evaluate_formula(g, q)) << "seed " << seed;
  }
}

TEST(Validate, Examples) {
  KnowledgeGraph g = film_graph();
  EXPECT_TRUE(validate(g, dnf(kWhoStarred, g)));

  ValidityReport sink = validate(g, dnf("(select ?x (directed ?x ?v))", g));
  EXPECT_FALSE(sink);
  EXPECT_FALSE(sink.reason.empty());

  EXPECT_FALSE(validate(g, dnf("(select ?x (and (directed $GL ?v) (starred ?v ?v)))", g)));
}

TEST(Validate, StructuralFailures) {
  KnowledgeGraph g = film_graph();
  // Cycle between bound variables.
  EXPECT_FALSE(validate(
      g, dnf("(select ?x (and (directed $GL ?u) (starred ?u ?w) (starred ?w ?u) (starred ?w ?x)))",
             g)));
  // A bound variable with no anchor above it is a second source.
  EXPECT_FALSE(validate(g, dnf("(select ?x (and (directed $GL ?x) (starred ?u ?x)))", g)));
  // A dangling bound variable is a second sink.
  EXPECT_FALSE(validate(g, dnf("(select ?x (and (directed $GL ?x) (directed $GL ?u)))", g)));
  // Anchors cannot be objects.
  EXPECT_FALSE(validate(g, dnf("(select ?x (and (directed $GL ?x) (starred $SW $GL)))", g)));
  // Only the failing conjunct is reported.
  ValidityReport r =
      validate(g, dnf("(select ?x (or (directed $GL ?x) (starred ?x ?v)))", g));
  EXPECT_FALSE(r);
  EXPECT_EQ(r.conjunct, 1u);
}

TEST(Evaluate, Examples) {
  KnowledgeGraph g = film_graph();
  EXPECT_EQ(evaluate(g, dnf(kWhoStarred, g)), ids(g, {"MH", "HF"}));
  EXPECT_EQ(evaluate(g, dnf("(select ?x (directed $GL ?x))", g)), ids(g, {"SW", "ESB"}));

  GraphBuilder b;
  b.add_triple("a", "r", "b");
  const RelationId unused = b.add_relation("unused");
  KnowledgeGraph h = std::move(b).build();
  DnfQuery q;
  q.vars = {{"a", VarKind::kAnchor, h.entity_id("a")}, {"x", VarKind::kTarget, 0}};
  q.target = 1;
  q.conjuncts = {Conjunct{{Atom{unused, 0, 1}}}};
  EXPECT_TRUE(evaluate(h, q).empty());
}

TEST(CoverSequences, Examples) {
  KnowledgeGraph g = film_graph();
  EXPECT_EQ(cover_sequences(g, dnf(kWhoStarred, g)),
            std::vector<RelationSeq>{seq(g, {"directed", "starred"})});
  EXPECT_EQ(cover_sequences(g, dnf("(select ?x (directed $GL ?x))", g)),
            std::vector<RelationSeq>{seq(g, {"directed"})});
  DnfQuery two = dnf("(select ?x (or (directed $GL ?x) (starred $SW ?x)))", g);
  auto cover = cover_sequences(g, two);
  EXPECT_EQ(cover.size(), two.n_or() + 1);
  EXPECT_EQ(cover, (std::vector<RelationSeq>{seq(g, {"directed"}), seq(g, {"starred"})}));
  EXPECT_THROW(cover_sequences(g, dnf("(select ?x (directed ?x ?v))", g)), PreconditionError);
}

TEST(RandomQuery, AlwaysValid) {
  KnowledgeGraph film = film_graph();
  DnfQuery small = random_query(film, 1, 1, 5);
  EXPECT_TRUE(validate(film, small));
  EXPECT_EQ(small.conjuncts.size(), 1u);
  EXPECT_EQ(small.conjuncts[0].atoms.size(), 1u);

  DnfQuery two = random_query(film, 2, 2, 5);
  EXPECT_TRUE(validate(film, two));
  EXPECT_LE(two.n_or(), 1u);

  KnowledgeGraph g = oracle::random_graph(60, 5, 300, 2);
  std::size_t valid = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    DnfQuery q = random_query(g, 3, 3, seed);
    if (validate(g, q)) ++valid;
    EXPECT_LE(q.conjuncts.size(), 3u);
  }
  EXPECT_EQ(valid, 100u);
}

TEST(RandomQuery, Deterministic) {
  KnowledgeGraph g = oracle::random_graph(60, 5, 300, 2);
  EXPECT_EQ(format_query(random_query(g, 3, 3, 77), g), format_query(random_query(g, 3, 3, 77), g));
}

EntitySet cover_reach(const KnowledgeGraph& g, const DnfQuery& q) {
  EntitySet out;
  for (const RelationSeq& s : cover_sequences(g, q)) {
    out = set_union(out, reach(g, q.anchor_entities(), s));
  }
  return out;
}

// The covering sequences of each conjunct start from the conjunct's own
// anchors; with several anchors the union of reach from all anchors is
// still a superset.
TEST(CoverSequences, ContainmentOnRandomPairs) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    KnowledgeGraph g = oracle::random_graph(30, 4, 120, seed);
    DnfQuery q = random_query(g, 3, 3, seed * 31);
    ASSERT_TRUE(validate(g, q));
    EXPECT_LE(cover_sequences(g, q).size(), q.n_or() + 1);
    EXPECT_TRUE(evaluate(g, q).is_subset_of(cover_reach(g, q))) << "seed " << seed;
  }
}

TEST(Evaluate, AddingTargetAtomNeverEnlarges) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    KnowledgeGraph g = oracle::random_graph(25, 3, 90, seed);
    DnfQuery q = random_query(g, 1, 3, seed);
    const EntitySet before = evaluate(g, q);
    std::mt19937_64 rng(seed);
    // Attach the new atom to any term already in the conjunct.
    std::vector<VarId> terms;
    for (const Atom& a : q.conjuncts[0].atoms) terms.push_back(a.subject);
    const VarId from = terms[rng() % terms.size()];
    q.conjuncts[0].atoms.push_back({static_cast<RelationId>(1 + rng() % 3), from, q.target});
    EXPECT_TRUE(evaluate(g, q).is_subset_of(before)) << "seed " << seed;
  }
}

TEST(Parser, RejectsUnsupportedForms) {
  KnowledgeGraph g = film_graph();
  EXPECT_THROW(parse_query("(select ?x (forall ?v (directed $GL ?v)))", g), ParseError);
  EXPECT_THROW(parse_query("(select ?x (not (directed $GL ?x)))", g), ParseError);
  EXPECT_THROW(parse_query("(select ?x (directed $GL ?x)", g), ParseError);
  EXPECT_THROW(parse_query("(select ?x (directed GL ?x))", g), ParseError);
  EXPECT_THROW(parse_query("(select ?x (self $GL ?x))", g), ParseError);
  EXPECT_THROW(parse_query("(select ?x (produced $GL ?x))", g), LookupError);
  EXPECT_THROW(parse_query("(select ?x (directed $Nobody ?x))", g), LookupError);
  EXPECT_THROW(parse_query_line("(select ?x (directed $d ?x))\tbroken", g), ParseError);
}

TEST(Parser, BindingsAndFormatRoundTrip) {
  KnowledgeGraph g = film_graph();
  EpfoQuery q =
      parse_query_line("(select ?x (and (directed $d ?v) (starred ?v ?x)))\td=GL", g);
  DnfQuery d = to_dnf(q);
  EXPECT_EQ(d.anchor_entities(), ids(g, {"GL"}));
  EXPECT_EQ(evaluate(g, d), ids(g, {"MH", "HF"}));
  const std::string text = format_query(d, g);
  EXPECT_EQ(text, "(select ?x (and (directed $d ?v) (starred ?v ?x)))\td=GL");
  EXPECT_EQ(format_query(to_dnf(parse_query_line(text, g)), g), text);

  DnfQuery u = dnf("(select ?x (or (directed $GL ?x) (starred $SW ?x)))", g);
  EXPECT_EQ(format_query(u, g),
            "(select ?x (or (directed $GL ?x) (starred $SW ?x)))\tGL=GL,SW=SW");
}

}  // namespace
}  // namespace kgseek
