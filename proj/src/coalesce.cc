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

#include "kgseek/coalesce.h"

#include <limits>
#include <ostream>

#include "kgseek/errors.h"

namespace kgseek {

EntitySet reach_step(const KnowledgeGraph& g, const EntitySet& frontier, RelationId r,
                     const FrontierPolicy& policy) {
  g.check_relation(r);
  if (r == kSelfRelation) {
    frontier.for_each([&](EntityId v) { g.check_entity(v); });
    return frontier;
  }
  FrontierAccumulator acc(g.num_entities(), policy);
  frontier.for_each([&](EntityId v) { acc.add_all(g.out_neighbors(v, r)); });
  return std::move(acc).finish();
}

EntitySet reach(const KnowledgeGraph& g, const EntitySet& anchors, const RelationSeq& seq,
                const FrontierPolicy& policy) {
  if (anchors.empty()) throw PreconditionError("reach: anchor set is empty");
  anchors.for_each([&](EntityId v) { g.check_entity(v); });
  EntitySet frontier = anchors;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    frontier = reach_step(g, frontier, seq[i], policy);
    if (frontier.empty()) return frontier;
  }
  return frontier;
}

std::vector<ReachableSet> enumerate_reachable_sets(const KnowledgeGraph& g,
                                                   const EntitySet& anchors,
                                                   std::size_t max_len,
                                                   const FrontierPolicy& policy) {
  if (anchors.empty()) throw PreconditionError("enumerate_reachable_sets: anchor set is empty");
  anchors.for_each([&](EntityId v) { g.check_entity(v); });

  std::vector<ReachableSet> out;
  out.push_back({RelationSeq(), anchors});
  std::size_t level_begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t level_end = out.size();
    // Parents are visited in lexicographic order and children by ascending
    // relation id, so each level comes out lexicographically sorted.
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (RelationId r : g.outgoing_relations(out[i].members)) {
        EntitySet next = reach_step(g, out[i].members, r, policy);
        RelationSeq seq = out[i].seq.extended(r);
        out.push_back({std::move(seq), std::move(next)});
      }
    }
    level_begin = level_end;
    if (level_begin == out.size()) break;
  }
  return out;
}

std::vector<PathCountRow> path_count_stats(const KnowledgeGraph& g, const EntitySet& anchors,
                                           std::size_t max_len) {
  if (max_len == 0) throw PreconditionError("path_count_stats: max_len must be >= 1");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

  // paths[v] = number of labeled paths of the current length ending at v.
  std::vector<std::uint64_t> paths(g.num_entities(), 0);
  anchors.for_each([&](EntityId v) {
    g.check_entity(v);
    paths[v] = 1;
  });

  std::vector<PathCountRow> rows;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::uint64_t> next(g.num_entities(), 0);
    for (EntityId v = 0; v < g.num_entities(); ++v) {
      if (paths[v] == 0) continue;
      for (const Triple& t : g.out_edges(v)) {
        next[t.object] = next[t.object] > kMax - paths[v] ? kMax : next[t.object] + paths[v];
      }
    }
    paths = std::move(next);
    std::uint64_t total = 0;
    for (std::uint64_t c : paths) total = total > kMax - c ? kMax : total + c;
    rows.push_back({len, total, 0});
  }

  for (const ReachableSet& rs : enumerate_reachable_sets(g, anchors, max_len)) {
    const std::size_t hops = rs.seq.size() - 1;
    if (hops >= 1) ++rows[hops - 1].coalesced_paths;
  }
  return rows;
}

void write_path_counts(std::ostream& out, const std::vector<PathCountRow>& rows) {
  out << "length,original_paths,coalesced_paths\n";
  for (const auto& row : rows) {
    out << row.length << ',' << row.original_paths << ',' << row.coalesced_paths << '\n';
  }
}

}  // namespace kgseek
