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


#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "kgseek/errors.h"
#include "kgseek/kg_store.h"
#include "oracle/oracle.h"
#include "test_graphs.h"

namespace kgseek {
namespace {

using testing::film_graph;
using testing::ids;

std::vector<EntityId> neighbors(const KnowledgeGraph& g, const char* v, const char* r) {
  auto span = g.out_neighbors(g.entity_id(v), g.relation_id(r));
  return {span.begin(), span.end()};
}

TEST(LoadTriples, EmptyInputHasOnlySelf) {
  std::istringstream in("");
  KnowledgeGraph g = read_triples(in, false);
  EXPECT_EQ(g.num_entities(), 0u);
  EXPECT_EQ(g.num_relations(), 1u);
  EXPECT_EQ(g.num_edges(), 0u);
  EXPECT_EQ(g.relation_name(kSelfRelation), "self");
  EXPECT_EQ(g.stats_line(), "entities=0 relations=1 edges=0");
}

TEST(LoadTriples, FilmGraphCounts) {
  KnowledgeGraph g = film_graph();
  EXPECT_EQ(g.stats_line(), "entities=5 relations=3 edges=5");
  EXPECT_EQ(std::vector<std::string>(g.relation_names().begin(), g.relation_names().end()),
            (std::vector<std::string>{"self", "directed", "starred"}));
  // First-seen order.
  EXPECT_EQ(g.entity_id("GL"), 0u);
  EXPECT_EQ(g.entity_id("SW"), 1u);
  EXPECT_EQ(g.entity_id("ESB"), 2u);
}

TEST(LoadTriples, FilmGraphWithInverses) {
  KnowledgeGraph g = film_graph(true);
  EXPECT_EQ(g.num_entities(), 5u);
  EXPECT_EQ(g.num_relations(), 5u);
  EXPECT_EQ(g.num_edges(), 10u);
  EXPECT_TRUE(g.has_inverses());
  for (const char* r : {"self", "directed", "directed^-1", "starred", "starred^-1"}) {
    EXPECT_TRUE(g.find_relation(r).has_value()) << r;
  }
  EXPECT_EQ(neighbors(g, "MH", "starred^-1"), ids(g, {"SW", "ESB"}).to_vector());
}

TEST(LoadTriples, CommentsBlankLinesAndDuplicates) {
  std::istringstream in("# header\n\nGL\tdirected\tSW\nGL\tdirected\tSW\n  \n");
  KnowledgeGraph g = read_triples(in, false);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.num_entities(), 2u);
}

TEST(LoadTriples, WrongFieldCountReportsLine) {
  std::istringstream in("a\tr\tb\na\tr\n");
  try {
    read_triples(in, false);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  std::istringstream four("a\tr\tb\tc\n");
  EXPECT_THROW(read_triples(four, false), ParseError);
  std::istringstream blank_field("a\t \tb\n");
  EXPECT_THROW(read_triples(blank_field, false), ParseError);
}

TEST(LoadTriples, SelfIsReserved) {
  std::istringstream in("a\tself\tb\n");
  EXPECT_THROW(read_triples(in, false), Error);
}

TEST(LoadTriples, MissingFile) {
  EXPECT_THROW(load_triples("/nonexistent/kgseek/graph.tsv", false), Error);
}

TEST(OutNeighbors, FilmGraphExamples) {
  KnowledgeGraph g = film_graph();
  EXPECT_EQ(neighbors(g, "GL", "directed"), ids(g, {"SW", "ESB"}).to_vector());
  EXPECT_TRUE(neighbors(g, "GL", "starred").empty());
  EXPECT_EQ(neighbors(g, "SW", "starred"), ids(g, {"MH", "HF"}).to_vector());
}

TEST(OutNeighbors, InvalidIdsThrowLookupError) {
  KnowledgeGraph g = film_graph();
  EXPECT_THROW(g.out_neighbors(99, 1), LookupError);
  EXPECT_THROW(g.out_neighbors(0, 99), LookupError);
  EXPECT_THROW(g.entity_id("Nobody"), LookupError);
  EXPECT_THROW(g.outgoing_relations(EntitySet{0, 42}), LookupError);
}

TEST(OutgoingRelations, FilmGraphExamples) {
  KnowledgeGraph g = film_graph();
  const RelationId directed = g.relation_id("directed");
  const RelationId starred = g.relation_id("starred");
  EXPECT_EQ(g.outgoing_relations(ids(g, {"GL"})), std::vector<RelationId>{directed});
  EXPECT_TRUE(g.outgoing_relations(EntitySet{}).empty());
  EXPECT_EQ(g.outgoing_relations(ids(g, {"SW", "ESB"})), std::vector<RelationId>{starred});
}

TEST(KnowledgeGraphProperty, IndexesAgreeWithEdgeList) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    KnowledgeGraph g = oracle::random_graph(40, 5, 150, seed, seed % 2 == 0);
    std::size_t from_index = 0;
    for (EntityId v = 0; v < g.num_entities(); ++v) {
      auto rels = g.outgoing_relations(v);
      for (RelationId r = 1; r < g.num_relations(); ++r) {
        auto objs = g.out_neighbors(v, r);
        const bool listed = std::binary_search(rels.begin(), rels.end(), r);
        EXPECT_EQ(!objs.empty(), listed);
        EXPECT_TRUE(std::is_sorted(objs.begin(), objs.end()));
        EXPECT_EQ(std::adjacent_find(objs.begin(), objs.end()), objs.end());
        for (EntityId o : objs) EXPECT_TRUE(g.has_edge(v, r, o));
        from_index += objs.size();
      }
      EXPECT_EQ(std::count(rels.begin(), rels.end(), kSelfRelation), 0);
    }
    EXPECT_EQ(from_index, g.num_edges());
    for (const Triple& t : g.edges()) {
      EXPECT_NE(t.relation, kSelfRelation);
      EXPECT_LT(t.subject, g.num_entities());
      EXPECT_LT(t.object, g.num_entities());
    }
  }
}

TEST(KnowledgeGraphProperty, WriteReadRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const bool inverses = seed % 2 == 0;
    KnowledgeGraph g = oracle::random_graph(30, 4, 100, seed, inverses);
    std::stringstream buf;
    write_triples(g, buf);
    KnowledgeGraph back = read_triples(buf, inverses);
    ASSERT_EQ(back.num_edges(), g.num_edges());
    std::vector<std::tuple<std::string, std::string, std::string>> a, b;
    for (const Triple& t : g.edges()) {
      a.emplace_back(g.entity_name(t.subject), g.relation_name(t.relation),
                     g.entity_name(t.object));
    }
    for (const Triple& t : back.edges()) {
      b.emplace_back(back.entity_name(t.subject), back.relation_name(t.relation),
                     back.entity_name(t.object));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(KnowledgeGraphProperty, FingerprintTracksContent) {
  EXPECT_EQ(film_graph().fingerprint(), film_graph().fingerprint());
  EXPECT_NE(film_graph().fingerprint(), film_graph(true).fingerprint());
}

TEST(InducedSubgraph, FilmGraphExamples) {
  KnowledgeGraph g = film_graph();
  Subgraph all = induced_subgraph(g, ids(g, {"GL", "SW", "ESB", "MH", "HF"}));
  EXPECT_EQ(all.graph.num_edges(), 5u);
  EXPECT_EQ(all.graph.num_entities(), 5u);

  Subgraph two = induced_subgraph(g, ids(g, {"GL", "SW"}));
  ASSERT_EQ(two.graph.num_edges(), 1u);
  const Triple t = two.graph.edges()[0];
  EXPECT_EQ(two.graph.entity_name(t.subject), "GL");
  EXPECT_EQ(two.graph.relation_name(t.relation), "directed");
  EXPECT_EQ(two.graph.entity_name(t.object), "SW");
  EXPECT_EQ(two.to_original[*two.to_local(g.entity_id("SW"))], g.entity_id("SW"));
  EXPECT_FALSE(two.to_local(g.entity_id("MH")).has_value());

  EXPECT_EQ(induced_subgraph(g, ids(g, {"MH", "HF"})).graph.num_edges(), 0u);
  EXPECT_THROW(induced_subgraph(g, EntitySet{0, 17}), LookupError);
}

TEST(InducedSubgraph, EdgeCountBound) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    KnowledgeGraph g = oracle::random_graph(25, 3, 60, seed);
    std::vector<EntityId> endpoints, keep;
    for (const Triple& t : g.edges()) {
      endpoints.push_back(t.subject);
      endpoints.push_back(t.object);
    }
    EntitySet endpoint_set(endpoints);
    for (EntityId v = 0; v < g.num_entities(); ++v) {
      if ((v * 2654435761u + seed) % 3 != 0) keep.push_back(v);
    }
    EntitySet nodes(keep);
    Subgraph sub = induced_subgraph(g, nodes);
    EXPECT_LE(sub.graph.num_edges(), g.num_edges());
    EXPECT_EQ(sub.graph.num_edges() == g.num_edges(), endpoint_set.is_subset_of(nodes));
    EXPECT_EQ(induced_subgraph(g, endpoint_set).graph.num_edges(), g.num_edges());
    // Relation ids agree with the parent graph.
    for (const Triple& t : sub.graph.edges()) {
      EXPECT_TRUE(g.has_edge(sub.to_original[t.subject], t.relation, sub.to_original[t.object]));
    }
  }
}

}  // namespace
}  // namespace kgseek
