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

#include "kgseek/seeker.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "kgseek/coalesce.h"
#include "kgseek/errors.h"

namespace kgseek {
namespace {

bool entry_less(double a_nll, const RelationSeq& a_seq, double b_nll, const RelationSeq& b_seq) {
  if (a_nll != b_nll) return a_nll < b_nll;
  return a_seq < b_seq;
}

// An expansion before its frontier is materialized. Only expansions that
// survive pruning get a reach_step.
struct Expansion {
  std::size_t parent;  // index into the current beam
  RelationId relation;
  bool carried;        // terminated entry copied forward unchanged
  double nll;
  RelationSeq seq;
};

bool same_beam(const std::vector<BeamEntry>& a, const std::vector<BeamEntry>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].seq != b[i].seq || a[i].nll != b[i].nll) return false;
  }
  return true;
}

}  // namespace

std::size_t scorer_call_bound(const KnowledgeGraph& g, const SeekParams& params) {
  return params.max_steps * params.beam_width * g.num_relations();
}

SeekResult seek(const KnowledgeGraph& g, const EntitySet& anchors,
                std::span<const std::string> question, const EdgeScorer& scorer,
                const SeekParams& params) {
  if (anchors.empty()) throw PreconditionError("seek: anchor set is empty");
  if (params.top_k < 1 || params.top_k > params.beam_width) {
    throw PreconditionError("seek: requires 1 <= k <= beam width");
  }
  if (params.max_steps < 1) throw PreconditionError("seek: max_steps must be >= 1");
  anchors.for_each([&](EntityId v) { g.check_entity(v); });

  SeekResult result;
  result.graph_fingerprint = g.fingerprint();

  std::vector<BeamEntry> beam{{anchors, RelationSeq(), 0.0}};
  std::vector<RelationId> options;
  for (std::size_t t = 1;; ++t) {
    std::vector<Expansion> pool;
    for (std::size_t i = 0; i < beam.size(); ++i) {
      const BeamEntry& entry = beam[i];
      if (t > 1 && entry.seq.back() == kSelfRelation) {
        pool.push_back({i, kSelfRelation, true, entry.nll, entry.seq});
        continue;
      }
      options = g.outgoing_relations(entry.frontier);
      // Terminating is offered from the second step on.
      if (t > 1) options.insert(options.begin(), kSelfRelation);
      if (options.empty()) continue;

      const std::vector<double> probs = scorer.score({question, entry.seq, options});
      check_distribution(probs, options.size());
      result.scorer_calls += options.size();
      for (std::size_t j = 0; j < options.size(); ++j) {
        // A zero-likelihood edge is never followed.
        if (probs[j] <= 0.0) continue;
        pool.push_back({i, options[j], false, entry.nll - std::log(probs[j]),
                        entry.seq.extended(options[j])});
      }
    }

    auto by_score = [](const Expansion& a, const Expansion& b) {
      return entry_less(a.nll, a.seq, b.nll, b.seq);
    };
    if (pool.size() > params.beam_width) {
      std::nth_element(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(params.beam_width),
                       pool.end(), by_score);
      pool.resize(params.beam_width);
    }
    std::sort(pool.begin(), pool.end(), by_score);

    std::vector<BeamEntry> next;
    next.reserve(pool.size());
    for (Expansion& e : pool) {
      const EntitySet& parent = beam[e.parent].frontier;
      EntitySet frontier = e.carried || e.relation == kSelfRelation
                               ? parent
                               : reach_step(g, parent, e.relation, params.frontier);
      next.push_back({std::move(frontier), std::move(e.seq), e.nll});
    }

    result.iterations = t;
    const bool unchanged = same_beam(next, beam);
    beam = std::move(next);
    if (unchanged || t + 1 > params.max_steps) break;
  }

  if (beam.size() > params.top_k) beam.resize(params.top_k);
  result.entries = std::move(beam);

  FrontierAccumulator candidates(g.num_entities(), params.frontier);
  FrontierAccumulator visited(g.num_entities(), params.frontier);
  visited.add_set(anchors);
  for (const BeamEntry& entry : result.entries) {
    candidates.add_set(entry.frontier);
    EntitySet frontier = anchors;
    for (std::size_t i = 1; i < entry.seq.size(); ++i) {
      frontier = reach_step(g, frontier, entry.seq[i], params.frontier);
      visited.add_set(frontier);
    }
  }
  result.candidates = std::move(candidates).finish();
  result.visited = std::move(visited).finish();
  return result;
}

Subgraph candidate_subgraph(const KnowledgeGraph& g, const SeekResult& result) {
  if (result.graph_fingerprint != g.fingerprint()) {
    throw PreconditionError("candidate_subgraph: result was computed on a different graph");
  }
  FrontierAccumulator nodes(g.num_entities(), FrontierPolicy{});
  result.visited.for_each([&](EntityId v) {
    nodes.add(v);
    for (const Triple& t : g.out_edges(v)) nodes.add(t.object);
  });
  return induced_subgraph(g, std::move(nodes).finish());
}

void write_seek_rows(std::ostream& out, const KnowledgeGraph& g, const SeekResult& result) {
  out << "rank,nll,sequence,candidate_count\n";
  const auto old_precision = out.precision(10);
  for (std::size_t i = 0; i < result.entries.size(); ++i) {
    const BeamEntry& e = result.entries[i];
    out << (i + 1) << ',' << e.nll << ',' << e.seq.to_string(g) << ',' << e.frontier.size()
        << '\n';
  }
  out.precision(old_precision);
}

}  // namespace kgseek
