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

// Beam-search knowledge seeking over the lazily built coalesced graph.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kgseek/entity_set.h"
#include "kgseek/kg_store.h"
#include "kgseek/relation_seq.h"
#include "kgseek/scorer.h"

namespace kgseek {

struct SeekParams {
  std::size_t beam_width = 10;
  std::size_t max_steps = 2;
  std::size_t top_k = 1;
  FrontierPolicy frontier;
};

struct BeamEntry {
  EntitySet frontier;  // reach(anchors, seq)
  RelationSeq seq;
  double nll = 0.0;  // accumulated -log likelihood
};

struct SeekResult {
  // At most top_k entries, ascending by (nll, seq).
  std::vector<BeamEntry> entries;
  // Union of the entries' frontiers.
  EntitySet candidates;
  // Nodes on any frontier along the returned sequences, anchors included.
  EntitySet visited;
  // Edge likelihood evaluations, i.e. the total number of options scored.
  std::size_t scorer_calls = 0;
  // Outer-loop iterations executed.
  std::size_t iterations = 0;
  std::uint64_t graph_fingerprint = 0;
};

// Throws PreconditionError for empty anchors or inconsistent parameters and
// ScorerContractError when the scorer does not return a distribution.
SeekResult seek(const KnowledgeGraph& g, const EntitySet& anchors,
                std::span<const std::string> question, const EdgeScorer& scorer,
                const SeekParams& params);

// Upper bound on SeekResult::scorer_calls: max_steps * beam_width * (|R| + 1),
// with |R| excluding self.
std::size_t scorer_call_bound(const KnowledgeGraph& g, const SeekParams& params);

// Subgraph induced by the visited nodes and their one-hop out-neighbours.
// Throws PreconditionError when `result` was computed on a different graph.
Subgraph candidate_subgraph(const KnowledgeGraph& g, const SeekResult& result);

// "rank,nll,sequence,candidate_count" header plus one row per entry.
void write_seek_rows(std::ostream& out, const KnowledgeGraph& g, const SeekResult& result);

}  // namespace kgseek
