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
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "kgseek/coalesce.h"
#include "kgseek/errors.h"
#include "oracle/oracle.h"
#include "test_graphs.h"

namespace kgseek {
namespace {

using testing::film_graph;
using testing::graph_from;
using testing::ids;
using testing::seq;

TEST(ReachStep, FilmGraphExamples) {
  KnowledgeGraph g = film_graph();
  EXPECT_EQ(reach_step(g, ids(g, {"GL"}), kSelfRelation), ids(g, {"GL"}));
  EXPECT_EQ(reach_step(g, ids(g, {"GL"}), g.relation_id("directed")), ids(g, {"SW", "ESB"}));
  EXPECT_EQ(reach_step(g, ids(g, {"SW", "ESB"}), g.relation_id("starred")),
            ids(g, {"MH", "HF"}));
  EXPECT_THROW(reach_step(g, ids(g, {"GL"}), 17), LookupError);
}

TEST(Reach, FilmGraphExamples) {
  KnowledgeGraph g = film_graph();
  EXPECT_EQ(reach(g, ids(g, {"GL"}), RelationSeq()), ids(g, {"GL"}));
  EXPECT_EQ(reach(g, ids(g, {"GL"}), seq(g, {"directed", "starred"})), ids(g, {"MH", "HF"}));
  EXPECT_TRUE(reach(g, ids(g, {"GL"}), seq(g, {"starred"})).empty());
  EXPECT_THROW(reach(g, EntitySet{}, RelationSeq()), PreconditionError);
}

TEST(EnumerateReachableSets, FilmGraphExamples) {
  KnowledgeGraph g = film_graph();
  auto zero = enumerate_reachable_sets(g, ids(g, {"GL"}), 0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].seq, RelationSeq());
  EXPECT_EQ(zero[0].members, ids(g, {"GL"}));

  auto two = enumerate_reachable_sets(g, ids(g, {"GL"}), 2);
  ASSERT_EQ(two.size(), 3u);
  EXPECT_EQ(two[0].seq, RelationSeq());
  EXPECT_EQ(two[1].seq, seq(g, {"directed"}));
  EXPECT_EQ(two[1].members, ids(g, {"SW", "ESB"}));
  EXPECT_EQ(two[2].seq, seq(g, {"directed", "starred"}));
  EXPECT_EQ(two[2].members, ids(g, {"MH", "HF"}));
}

// Same (sequence, set) pairs as the node-level path enumerator.
TEST(EnumerateReachableSets, MatchesPathEnumerationOracle) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    KnowledgeGraph g = oracle::random_graph(50, 4, 160, seed);
    std::mt19937_64 rng(seed);
    EntitySet anchors{static_cast<EntityId>(rng() % 50), static_cast<EntityId>(rng() % 50)};
    auto expected = oracle::enumerate_paths(g, anchors, 3);
    auto got = enumerate_reachable_sets(g, anchors, 3);
    ASSERT_EQ(got.size(), expected.size()) << "seed " << seed;
    for (const auto& rs : got) {
      auto it = expected.find(rs.seq.hop_relations());
      ASSERT_NE(it, expected.end()) << "seed " << seed;
      EXPECT_EQ(rs.members.to_vector(), it->second);
    }
    for (std::size_t i = 1; i < got.size(); ++i) {
      const auto& a = got[i - 1].seq;
      const auto& b = got[i].seq;
      EXPECT_TRUE(a.size() < b.size() || (a.size() == b.size() && a < b));
    }
  }
}

TEST(PathCountStats, FilmGraph) {
  KnowledgeGraph g = film_graph();
  auto rows = path_count_stats(g, ids(g, {"GL"}), 2);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].length, 1u);
  EXPECT_EQ(rows[0].original_paths, 2u);
  EXPECT_EQ(rows[0].coalesced_paths, 1u);
  EXPECT_EQ(rows[1].length, 2u);
  EXPECT_EQ(rows[1].original_paths, 3u);
  EXPECT_EQ(rows[1].coalesced_paths, 1u);
  EXPECT_THROW(path_count_stats(g, ids(g, {"GL"}), 0), PreconditionError);

  std::ostringstream out;
  write_path_counts(out, rows);
  EXPECT_EQ(out.str(), "length,original_paths,coalesced_paths\n1,2,1\n2,3,1\n");
}

TEST(PathCountStats, SingleEdgeAndStar) {
  KnowledgeGraph edge = graph_from({"a\tr\tb"});
  auto one = path_count_stats(edge, ids(edge, {"a"}), 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].original_paths, 1u);
  EXPECT_EQ(one[0].coalesced_paths, 1u);

  std::string text;
  for (int i = 1; i <= 10; ++i) text += "a\tr\tb" + std::to_string(i) + "\n";
  std::istringstream in(text);
  KnowledgeGraph star = read_triples(in, false);
  auto rows = path_count_stats(star, ids(star, {"a"}), 1);
  EXPECT_EQ(rows[0].original_paths, 10u);
  EXPECT_EQ(rows[0].coalesced_paths, 1u);
}

// Exact node-path counts by brute force, for the compression bound.
std::uint64_t count_paths(const KnowledgeGraph& g, EntityId v, std::size_t len) {
  if (len == 0) return 1;
  std::uint64_t n = 0;
  for (const Triple& t : g.out_edges(v)) n += count_paths(g, t.object, len - 1);
  return n;
}

TEST(PathCountStats, CompressionBoundAndOriginalCountOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    KnowledgeGraph g = oracle::random_graph(30, 3, 120, seed);
    EntitySet anchors{0, 1, 2};
    auto rows = path_count_stats(g, anchors, 3);
    const double r = static_cast<double>(g.num_relations() - 1);
    for (const auto& row : rows) {
      std::uint64_t brute = 0;
      anchors.for_each([&](EntityId a) { brute += count_paths(g, a, row.length); });
      EXPECT_EQ(row.original_paths, brute);
      EXPECT_LE(row.coalesced_paths, row.original_paths);
      EXPECT_LE(static_cast<double>(row.coalesced_paths), std::pow(r, row.length));
    }
  }
}

class CoalesceProperty : public ::testing::TestWithParam<std::size_t> {};

// Run every property under both frontier representations.
TEST_P(CoalesceProperty, MonotoneCompositionAbsorption) {
  const FrontierPolicy policy{GetParam()};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    KnowledgeGraph g = oracle::random_graph(60, 4, 200, seed);
    std::mt19937_64 rng(seed * 7 + 1);
    std::vector<EntityId> small_ids, big_ids;
    for (EntityId v = 0; v < 60; ++v) {
      const auto roll = rng() % 4;
      if (roll == 0) small_ids.push_back(v);
      if (roll <= 1) big_ids.push_back(v);
    }
    if (small_ids.empty()) small_ids.push_back(0), big_ids.push_back(0);
    const EntitySet small(small_ids), big(big_ids);
    for (RelationId r = 0; r < g.num_relations(); ++r) {
      EXPECT_TRUE(reach_step(g, small, r, policy).is_subset_of(reach_step(g, big, r, policy)));
    }

    std::vector<RelationId> a{kSelfRelation}, b{kSelfRelation};
    for (int i = 0; i < 2; ++i) a.push_back(1 + rng() % 4);
    for (int i = 0; i < 2; ++i) b.push_back(1 + rng() % 4);
    std::vector<RelationId> ab = a;
    ab.insert(ab.end(), b.begin() + 1, b.end());
    const EntitySet mid = reach(g, small, RelationSeq(a), policy);
    const EntitySet whole = reach(g, small, RelationSeq(ab), policy);
    if (mid.empty()) {
      EXPECT_TRUE(whole.empty());
    } else {
      EXPECT_EQ(whole, reach(g, mid, RelationSeq(b), policy));
    }
    EXPECT_EQ(whole.to_vector(), oracle::path_reach(g, small, RelationSeq(ab).hop_relations()));
  }
}

TEST_P(CoalesceProperty, EmptyFrontierAbsorbs) {
  KnowledgeGraph g = graph_from({"a\tr\tb", "b\ts\tc"});
  const EntitySet a = ids(g, {"a"});
  const RelationId r = g.relation_id("r"), s = g.relation_id("s");
  EXPECT_TRUE(reach(g, a, RelationSeq({kSelfRelation, s}), FrontierPolicy{GetParam()}).empty());
  EXPECT_TRUE(reach(g, a, RelationSeq({kSelfRelation, s, r, s}), FrontierPolicy{GetParam()}).empty());
  EXPECT_EQ(reach(g, a, RelationSeq({kSelfRelation, r, s}), FrontierPolicy{GetParam()}),
            ids(g, {"c"}));
}

INSTANTIATE_TEST_SUITE_P(Thresholds, CoalesceProperty,
                         ::testing::Values(std::size_t{1}, std::size_t{8}, kDefaultDenseThreshold));

}  // namespace
}  // namespace kgseek
