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


#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kgseek/coalesce.h"
#include "kgseek/errors.h"
#include "kgseek/seeker.h"
#include "kgseek/synthbench.h"
#include "oracle/oracle.h"
#include "test_graphs.h"

namespace kgseek {
namespace {

using testing::film_graph;
using testing::graph_from;
using testing::ids;
using testing::seq;

const std::vector<std::string> kNoQuestion;

SeekParams params(std::size_t beam, std::size_t steps, std::size_t k) {
  SeekParams p;
  p.beam_width = beam;
  p.max_steps = steps;
  p.top_k = k;
  return p;
}

void expect_matches_exhaustive(const KnowledgeGraph& g, const EntitySet& anchors,
                               const EdgeScorer& scorer, const SeekParams& p) {
  SeekResult got = seek(g, anchors, kNoQuestion, scorer, p);
  auto want = oracle::exhaustive_top_k(g, anchors, kNoQuestion, scorer, p.max_steps, p.top_k);
  ASSERT_EQ(got.entries.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got.entries[i].seq, want[i].seq) << "rank " << i;
    EXPECT_NEAR(got.entries[i].nll, want[i].nll, 1e-9);
    EXPECT_EQ(got.entries[i].frontier.to_vector(), want[i].frontier);
  }
}

TEST(Seek, FilmGraphUniformMatchesExhaustive) {
  KnowledgeGraph g = film_graph();
  expect_matches_exhaustive(g, ids(g, {"GL"}), UniformScorer(), params(4, 2, 2));
}

TEST(Seek, FilmGraphOracleHandTrace) {
  KnowledgeGraph g = film_graph();
  OracleScorer oracle({seq(g, {"directed", "starred"})});
  SeekResult r = seek(g, ids(g, {"GL"}), kNoQuestion, oracle, params(1, 2, 1));
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].seq, seq(g, {"directed", "starred"}));
  EXPECT_EQ(r.entries[0].seq.to_string(g), "self directed starred");
  EXPECT_EQ(r.candidates, ids(g, {"MH", "HF"}));
  // Step 1 scores {directed}; step 2 scores {self, starred}.
  EXPECT_EQ(r.scorer_calls, 3u);
  EXPECT_EQ(r.visited, ids(g, {"GL", "SW", "ESB", "MH", "HF"}));
  EXPECT_NEAR(r.entries[0].nll, -std::log(1.0 - OracleScorer::kEpsilon), 1e-12);
}

TEST(Seek, TerminatedEntriesAreCarried) {
  KnowledgeGraph g = film_graph();
  OracleScorer oracle({seq(g, {"directed"})});
  SeekResult r = seek(g, ids(g, {"GL"}), kNoQuestion, oracle, params(2, 3, 1));
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].seq, seq(g, {"directed"}).extended(kSelfRelation));
  EXPECT_TRUE(r.entries[0].seq.is_terminated());
  EXPECT_EQ(r.candidates, ids(g, {"SW", "ESB"}));
}

TEST(Seek, WideBeamMatchesExhaustiveOnRandomGraphs) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    KnowledgeGraph g = oracle::random_graph(12, 1 + seed % 3, 30, seed);
    const std::size_t steps = 1 + seed % 3;
    std::size_t beam = 1;
    for (std::size_t i = 0; i < steps; ++i) beam *= g.num_relations();
    oracle::RandomScorer scorer(seed);
    expect_matches_exhaustive(g, EntitySet{static_cast<EntityId>(seed % 12)}, scorer,
                              params(beam, steps, std::min<std::size_t>(beam, 5)));
  }
}

TEST(Seek, CallBoundExample) {
  std::string text;
  for (int v = 0; v < 20; ++v) {
    for (int r = 0; r < 3; ++r) {
      text += "v" + std::to_string(v) + "\tq" + std::to_string(r) + "\tv" +
              std::to_string((v * 7 + r * 3 + 1) % 20) + "\n";
    }
  }
  std::istringstream in(text);
  KnowledgeGraph g = read_triples(in, false);
  const SeekParams p = params(10, 2, 1);
  EXPECT_EQ(scorer_call_bound(g, p), 80u);
  for (EntityId a = 0; a < 20; ++a) {
    EXPECT_LE(seek(g, EntitySet{a}, kNoQuestion, UniformScorer(), p).scorer_calls, 80u);
    EXPECT_LE(seek(g, EntitySet{a}, kNoQuestion, oracle::RandomScorer(a), p).scorer_calls, 80u);
  }
}

// Structural invariants of every result, with nll re-derived step by step.
TEST(Seek, ResultInvariants) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    KnowledgeGraph g = oracle::random_graph(40, 4, 140, seed, seed % 3 == 0);
    oracle::RandomScorer scorer(seed);
    const EntitySet anchors{static_cast<EntityId>(seed % 40), static_cast<EntityId>(seed * 3 % 40)};
    const SeekParams p = params(5, 3, 3);
    SeekResult r = seek(g, anchors, kNoQuestion, scorer, p);
    EXPECT_LE(r.scorer_calls, scorer_call_bound(g, p));
    EntitySet uni;
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      const BeamEntry& e = r.entries[i];
      EXPECT_TRUE(std::isfinite(e.nll));
      EXPECT_GE(e.nll, 0.0);
      EXPECT_EQ(e.frontier, reach(g, anchors, e.seq));
      if (i > 0) {
        const BeamEntry& prev = r.entries[i - 1];
        EXPECT_TRUE(prev.nll < e.nll || (prev.nll == e.nll && prev.seq < e.seq));
      }
      uni = set_union(uni, e.frontier);

      // Replay: every step adds a non-negative amount and the total matches.
      double nll = 0.0;
      std::vector<RelationId> prefix{kSelfRelation};
      EntitySet frontier = anchors;
      for (std::size_t t = 1; t < e.seq.size(); ++t) {
        std::vector<RelationId> options = g.outgoing_relations(frontier);
        if (t > 1) options.insert(options.begin(), kSelfRelation);
        RelationSeq pre(prefix);
        auto probs = scorer.score({kNoQuestion, pre, options});
        const auto it = std::find(options.begin(), options.end(), e.seq[t]);
        ASSERT_NE(it, options.end());
        const double step = -std::log(probs[static_cast<std::size_t>(it - options.begin())]);
        EXPECT_GE(step, 0.0);
        nll += step;
        prefix.push_back(e.seq[t]);
        frontier = reach_step(g, frontier, e.seq[t]);
        if (e.seq[t] == kSelfRelation) break;
      }
      EXPECT_NEAR(nll, e.nll, 1e-9);
    }
    EXPECT_EQ(r.candidates, uni);
  }
}

TEST(Seek, DeterministicAndRepresentationIndependent) {
  KnowledgeGraph g = oracle::random_graph(80, 5, 400, 9);
  oracle::RandomScorer scorer(4);
  SeekParams p = params(6, 3, 4);
  SeekResult a = seek(g, EntitySet{1, 2}, kNoQuestion, scorer, p);
  SeekResult b = seek(g, EntitySet{1, 2}, kNoQuestion, scorer, p);
  p.frontier.dense_threshold = 1;
  SeekResult c = seek(g, EntitySet{1, 2}, kNoQuestion, scorer, p);
  for (const SeekResult* other : {&b, &c}) {
    ASSERT_EQ(a.entries.size(), other->entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      EXPECT_EQ(a.entries[i].seq, other->entries[i].seq);
      EXPECT_EQ(a.entries[i].nll, other->entries[i].nll);
      EXPECT_EQ(a.entries[i].frontier, other->entries[i].frontier);
    }
    EXPECT_EQ(a.candidates, other->candidates);
    EXPECT_EQ(a.visited, other->visited);
    EXPECT_EQ(a.scorer_calls, other->scorer_calls);
  }
}

TEST(Seek, OracleScoringContainsAnswers) {
  SynthSpec spec;
  spec.n_entities = 300;
  spec.n_relations = 6;
  spec.n_questions = 100;
  spec.seed = 17;
  SynthData data = gen_synthetic(spec);
  for (const QAExample& ex : data.examples) {
    OracleScorer oracle(ex.gold_sequences);
    SeekResult r = seek(data.graph, ex.anchors, ex.question, oracle, params(10, 2, 1));
    EXPECT_TRUE(ex.answers.is_subset_of(r.candidates));
  }
}

class BadScorer final : public EdgeScorer {
 public:
  explicit BadScorer(int mode) : mode_(mode) {}
  std::vector<double> score(const ScoreRequest& req) const override {
    std::vector<double> p(req.options.size(), 1.0 / static_cast<double>(req.options.size()));
    if (mode_ == 0) p[0] = -0.5, p.back() += 0.5;
    if (mode_ == 1) p[0] *= 0.9;
    if (mode_ == 2) p.push_back(0.0);
    if (mode_ == 3) p[0] = std::nan("");
    return p;
  }

 private:
  int mode_;
};

TEST(Seek, Errors) {
  KnowledgeGraph g = film_graph();
  const EntitySet gl = ids(g, {"GL"});
  EXPECT_THROW(seek(g, EntitySet{}, kNoQuestion, UniformScorer(), params(4, 2, 1)),
               PreconditionError);
  EXPECT_THROW(seek(g, gl, kNoQuestion, UniformScorer(), params(2, 2, 3)), PreconditionError);
  EXPECT_THROW(seek(g, gl, kNoQuestion, UniformScorer(), params(2, 2, 0)), PreconditionError);
  EXPECT_THROW(seek(g, gl, kNoQuestion, UniformScorer(), params(2, 0, 1)), PreconditionError);
  EXPECT_THROW(seek(g, EntitySet{99}, kNoQuestion, UniformScorer(), params(2, 2, 1)), LookupError);
  for (int mode = 0; mode < 4; ++mode) {
    EXPECT_THROW(seek(g, gl, kNoQuestion, BadScorer(mode), params(4, 2, 1)), ScorerContractError)
        << mode;
  }
}

TEST(Seek, FewerSequencesThanK) {
  KnowledgeGraph g = graph_from({"a\tr\tb"});
  SeekResult r = seek(g, ids(g, {"a"}), kNoQuestion, UniformScorer(), params(3, 1, 3));
  ASSERT_EQ(r.entries.size(), 1u);
  std::ostringstream out;
  write_seek_rows(out, g, r);
  EXPECT_EQ(out.str(), "rank,nll,sequence,candidate_count\n1,0,self r,1\n");
}

SeekResult visited_only(const KnowledgeGraph& g, EntitySet visited) {
  SeekResult r;
  r.visited = std::move(visited);
  r.graph_fingerprint = g.fingerprint();
  return r;
}

TEST(CandidateSubgraph, Examples) {
  KnowledgeGraph g = film_graph();
  Subgraph whole = candidate_subgraph(g, visited_only(g, ids(g, {"GL", "SW", "ESB", "MH", "HF"})));
  EXPECT_EQ(whole.graph.num_entities(), 5u);
  EXPECT_EQ(whole.graph.num_edges(), 5u);

  Subgraph gl = candidate_subgraph(g, visited_only(g, ids(g, {"GL"})));
  EXPECT_EQ(EntitySet(gl.to_original), ids(g, {"GL", "SW", "ESB"}));
  EXPECT_EQ(gl.graph.num_edges(), 2u);

  KnowledgeGraph chain = graph_from({"a\tr\tb", "b\tr\tc", "c\tr\td"});
  Subgraph ab = candidate_subgraph(chain, visited_only(chain, ids(chain, {"a", "b"})));
  EXPECT_EQ(EntitySet(ab.to_original), ids(chain, {"a", "b", "c"}));
  EXPECT_EQ(ab.graph.num_edges(), 2u);

  EXPECT_THROW(candidate_subgraph(chain, visited_only(g, ids(g, {"GL"}))), PreconditionError);
}

TEST(CandidateSubgraph, InverseRelationsAddInNeighbours) {
  KnowledgeGraph g = film_graph(true);
  Subgraph sw = candidate_subgraph(g, visited_only(g, ids(g, {"SW"})));
  EXPECT_EQ(EntitySet(sw.to_original), ids(g, {"GL", "SW", "MH", "HF"}));
}

}  // namespace
}  // namespace kgseek
