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

// Brute-force reference implementations. They read only the raw edge list of
// a graph and never call into coalesce or seeker, so they can serve as
// independent oracles for both.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kgseek/entity_set.h"
#include "kgseek/kg_store.h"
#include "kgseek/relation_seq.h"
#include "kgseek/scorer.h"

namespace kgseek::oracle {

// Label sequence (without the leading self) -> sorted endpoint list, for
// every node-level path of at most `max_len` edges starting at an anchor.
// The empty sequence maps to the anchors.
using PathEndpoints = std::map<std::vector<RelationId>, std::vector<EntityId>>;
PathEndpoints enumerate_paths(const KnowledgeGraph& g, const EntitySet& anchors,
                              std::size_t max_len);

// Endpoints of node-level paths following `hops` exactly.
std::vector<EntityId> path_reach(const KnowledgeGraph& g, const EntitySet& anchors,
                                 std::span<const RelationId> hops);

struct ScoredSeq {
  RelationSeq seq;
  double nll = 0.0;
  std::vector<EntityId> frontier;
};

// Every sequence the beam search could end with if it never pruned, scored
// by the same per-step rules, sorted by (nll, seq); the first k are returned.
std::vector<ScoredSeq> exhaustive_top_k(const KnowledgeGraph& g, const EntitySet& anchors,
                                        std::span<const std::string> question,
                                        const EdgeScorer& scorer, std::size_t max_steps,
                                        std::size_t k);

// Smallest reachable superset by exhaustive path enumeration: all sequences
// (with leading self) whose endpoint set contains `answers` with minimum size.
std::vector<RelationSeq> exhaustive_weak_labels(const KnowledgeGraph& g, const EntitySet& anchors,
                                                const EntitySet& answers, std::size_t max_len);

// Deterministic pseudo-random distribution over options, keyed by seed,
// prefix and option. Probabilities are bounded away from zero.
class RandomScorer final : public EdgeScorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  std::vector<double> score(const ScoreRequest& req) const override;

 private:
  std::uint64_t seed_;
};

// Random multigraph with entities n<i> and relations p<i>; duplicate draws
// collapse, so the edge count is at most n_edges.
KnowledgeGraph random_graph(std::size_t n_entities, std::size_t n_relations, std::size_t n_edges,
                            std::uint64_t seed, bool add_inverses = false);

}  // namespace kgseek::oracle
