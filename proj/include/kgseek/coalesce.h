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

// Reach semantics over relation sequences and the question-dependent coalesced
// graph. Coalesced nodes (entity sets) are produced lazily, one frontier at a
// time; nothing is materialized globally.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kgseek/entity_set.h"
#include "kgseek/kg_store.h"
#include "kgseek/relation_seq.h"

namespace kgseek {

// One coalesced edge: frontier --r--> result. self is the identity.
EntitySet reach_step(const KnowledgeGraph& g, const EntitySet& frontier, RelationId r,
                     const FrontierPolicy& policy = {});

// Left fold of reach_step over `seq`, short-circuiting to the empty set.
// Throws PreconditionError for empty anchors.
EntitySet reach(const KnowledgeGraph& g, const EntitySet& anchors, const RelationSeq& seq,
                const FrontierPolicy& policy = {});

struct ReachableSet {
  RelationSeq seq;
  EntitySet members;
};

// Every relation sequence with at most `max_len` hops and a nonempty reach,
// ordered by length and then lexicographically by relation id.
std::vector<ReachableSet> enumerate_reachable_sets(const KnowledgeGraph& g,
                                                   const EntitySet& anchors,
                                                   std::size_t max_len,
                                                   const FrontierPolicy& policy = {});

struct PathCountRow {
  std::size_t length = 0;
  // Labeled edge paths of exactly `length` edges starting at an anchor.
  // Saturates at UINT64_MAX.
  std::uint64_t original_paths = 0;
  // Relation sequences of exactly `length` hops with nonempty reach.
  std::uint64_t coalesced_paths = 0;
};

// Throws PreconditionError when max_len == 0.
std::vector<PathCountRow> path_count_stats(const KnowledgeGraph& g, const EntitySet& anchors,
                                           std::size_t max_len);

// "length,original_paths,coalesced_paths" rows with a header.
void write_path_counts(std::ostream& out, const std::vector<PathCountRow>& rows);

}  // namespace kgseek
