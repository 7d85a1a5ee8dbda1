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

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <variant>
#include <vector>

namespace kgseek {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

// Reserved relation id. Marks both the start of every relation sequence and
// the terminal option during knowledge seeking; it never labels a stored edge.
inline constexpr RelationId kSelfRelation = 0;

// Member count at which frontiers switch from a sorted id array to a dense
// bitset over the entity universe.
inline constexpr std::size_t kDefaultDenseThreshold = 4096;

struct FrontierPolicy {
  std::size_t dense_threshold = kDefaultDenseThreshold;
};

// Fixed-size bitset over entity ids [0, universe).
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t universe) : universe_(universe), words_((universe + 63) / 64) {}

  std::size_t universe() const { return universe_; }
  void set(EntityId id) { words_[id >> 6] |= std::uint64_t{1} << (id & 63); }
  bool test(EntityId id) const {
    return id < universe_ && (words_[id >> 6] >> (id & 63)) & 1u;
  }
  std::span<std::uint64_t> words() { return words_; }
  std::span<const std::uint64_t> words() const { return words_; }
  std::size_t count() const;
  // Grows (never shrinks) the universe.
  void grow(std::size_t universe) {
    if (universe <= universe_) return;
    universe_ = universe;
    words_.resize((universe + 63) / 64, 0);
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

// A set of entity ids: one node of the coalesced graph. Small sets are kept as
// a sorted duplicate-free array; large ones as a dense bitset. Iteration,
// equality and all queries are representation-independent and always visit
// ids in ascending order.
class EntitySet {
 public:
  EntitySet() = default;
  EntitySet(std::initializer_list<EntityId> ids);
  // Sorts and deduplicates.
  explicit EntitySet(std::vector<EntityId> ids);
  explicit EntitySet(Bitset bits);

  static EntitySet from_sorted_unique(std::vector<EntityId> ids);

  bool is_dense() const { return std::holds_alternative<Bitset>(rep_); }
  // The bitset when dense, otherwise nullptr.
  const Bitset* dense_bits() const { return std::get_if<Bitset>(&rep_); }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(EntityId id) const;

  // Ascending ids.
  std::vector<EntityId> to_vector() const;
  // Largest id + 1, or 0 when empty.
  std::size_t id_bound() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (const auto* ids = std::get_if<std::vector<EntityId>>(&rep_)) {
      for (EntityId id : *ids) fn(id);
      return;
    }
    const auto words = std::get<Bitset>(rep_).words();
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      while (bits != 0) {
        const int bit = __builtin_ctzll(bits);
        fn(static_cast<EntityId>(w * 64 + static_cast<std::size_t>(bit)));
        bits &= bits - 1;
      }
    }
  }

  bool is_subset_of(const EntitySet& other) const;
  std::size_t intersection_size(const EntitySet& other) const;

  // Converts between representations according to the policy. `universe` is
  // needed to build a bitset.
  EntitySet normalized(std::size_t universe, const FrontierPolicy& policy) const;

  friend bool operator==(const EntitySet& a, const EntitySet& b);

 private:
  std::variant<std::vector<EntityId>, Bitset> rep_;
  std::size_t size_ = 0;
};

EntitySet set_union(const EntitySet& a, const EntitySet& b);
EntitySet set_intersection(const EntitySet& a, const EntitySet& b);

// Collects ids from many sources and emits one EntitySet, using a bitset once
// the collected count could exceed the dense threshold.
class FrontierAccumulator {
 public:
  FrontierAccumulator(std::size_t universe, const FrontierPolicy& policy)
      : universe_(universe), policy_(policy) {}

  void add(EntityId id);
  void add_all(std::span<const EntityId> ids);
  void add_set(const EntitySet& set);
  EntitySet finish() &&;

 private:
  void densify();

  std::size_t universe_;
  FrontierPolicy policy_;
  std::vector<EntityId> sparse_;
  Bitset dense_;
  bool is_dense_ = false;
};

}  // namespace kgseek
