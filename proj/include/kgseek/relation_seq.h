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

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "kgseek/entity_set.h"

namespace kgseek {

class KnowledgeGraph;

// An ordered relation sequence. The first element is always the self
// relation; a trailing self (at position > 0) marks a terminated sequence.
class RelationSeq {
 public:
  RelationSeq() : rels_{kSelfRelation} {}
  // `rels` must start with self; throws PreconditionError otherwise.
  explicit RelationSeq(std::vector<RelationId> rels);
  // Builds (self, hops...).
  static RelationSeq from_hops(std::span<const RelationId> hops);

  std::span<const RelationId> relations() const { return rels_; }
  std::size_t size() const { return rels_.size(); }
  RelationId back() const { return rels_.back(); }
  RelationId operator[](std::size_t i) const { return rels_[i]; }

  // Non-self relations, i.e. the number of edges followed.
  std::size_t hops() const;
  // True when the last element is a terminal self (after position 0).
  bool is_terminated() const { return rels_.size() > 1 && rels_.back() == kSelfRelation; }
  // The non-self relations in order.
  std::vector<RelationId> hop_relations() const;

  RelationSeq extended(RelationId r) const;

  // Space-separated relation names, e.g. "self directed starred".
  std::string to_string(const KnowledgeGraph& g) const;

  friend bool operator==(const RelationSeq&, const RelationSeq&) = default;
  friend std::strong_ordering operator<=>(const RelationSeq& a, const RelationSeq& b) {
    return a.rels_ <=> b.rels_;
  }

 private:
  std::vector<RelationId> rels_;
};

}  // namespace kgseek
