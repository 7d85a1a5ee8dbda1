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

#include "kgseek/entity_set.h"

#include <algorithm>

#include "kgseek/kernels.h"

namespace kgseek {

std::size_t Bitset::count() const { return kernels::bitset_popcount(words_); }

EntitySet::EntitySet(std::initializer_list<EntityId> ids)
    : EntitySet(std::vector<EntityId>(ids)) {}

EntitySet::EntitySet(std::vector<EntityId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  size_ = ids.size();
  rep_ = std::move(ids);
}

EntitySet::EntitySet(Bitset bits) {
  size_ = bits.count();
  rep_ = std::move(bits);
}

EntitySet EntitySet::from_sorted_unique(std::vector<EntityId> ids) {
  EntitySet set;
  set.size_ = ids.size();
  set.rep_ = std::move(ids);
  return set;
}

bool EntitySet::contains(EntityId id) const {
  if (const auto* ids = std::get_if<std::vector<EntityId>>(&rep_)) {
    return std::binary_search(ids->begin(), ids->end(), id);
  }
  return std::get<Bitset>(rep_).test(id);
}

std::vector<EntityId> EntitySet::to_vector() const {
  if (const auto* ids = std::get_if<std::vector<EntityId>>(&rep_)) return *ids;
  std::vector<EntityId> out;
  out.reserve(size_);
  for_each([&](EntityId id) { out.push_back(id); });
  return out;
}

std::size_t EntitySet::id_bound() const {
  if (size_ == 0) return 0;
  if (const auto* ids = std::get_if<std::vector<EntityId>>(&rep_)) {
    return static_cast<std::size_t>(ids->back()) + 1;
  }
  const auto words = std::get<Bitset>(rep_).words();
  for (std::size_t w = words.size(); w-- > 0;) {
    if (words[w] != 0) return w * 64 + (64 - static_cast<std::size_t>(__builtin_clzll(words[w])));
  }
  return 0;
}

bool EntitySet::is_subset_of(const EntitySet& other) const {
  if (size_ > other.size_) return false;
  return intersection_size(other) == size_;
}

std::size_t EntitySet::intersection_size(const EntitySet& other) const {
  const auto* a_bits = std::get_if<Bitset>(&rep_);
  const auto* b_bits = std::get_if<Bitset>(&other.rep_);
  if (a_bits != nullptr && b_bits != nullptr) {
    return kernels::bitset_and_popcount(a_bits->words(), b_bits->words());
  }
  if (a_bits == nullptr && b_bits == nullptr) {
    const auto& a = std::get<std::vector<EntityId>>(rep_);
    const auto& b = std::get<std::vector<EntityId>>(other.rep_);
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
      if (*i < *j) {
        ++i;
      } else if (*j < *i) {
        ++j;
      } else {
        ++count;
        ++i;
        ++j;
      }
    }
    return count;
  }
  // Mixed: probe the sparse side against the dense one.
  const EntitySet& sparse = a_bits == nullptr ? *this : other;
  const Bitset& dense = a_bits == nullptr ? *b_bits : *a_bits;
  std::size_t count = 0;
  for (EntityId id : std::get<std::vector<EntityId>>(sparse.rep_)) count += dense.test(id);
  return count;
}

EntitySet EntitySet::normalized(std::size_t universe, const FrontierPolicy& policy) const {
  const bool want_dense = size_ >= policy.dense_threshold && size_ > 0;
  if (want_dense == is_dense()) {
    if (!want_dense || std::get<Bitset>(rep_).universe() == universe) return *this;
  }
  if (want_dense) {
    Bitset bits(std::max(universe, id_bound()));
    for_each([&](EntityId id) { bits.set(id); });
    return EntitySet(std::move(bits));
  }
  return from_sorted_unique(to_vector());
}

bool operator==(const EntitySet& a, const EntitySet& b) {
  if (a.size_ != b.size_) return false;
  const auto* a_ids = std::get_if<std::vector<EntityId>>(&a.rep_);
  const auto* b_ids = std::get_if<std::vector<EntityId>>(&b.rep_);
  if (a_ids != nullptr && b_ids != nullptr) return *a_ids == *b_ids;
  return a.intersection_size(b) == a.size_;
}

EntitySet set_union(const EntitySet& a, const EntitySet& b) {
  if (a.is_dense() || b.is_dense()) {
    const std::size_t universe = std::max(a.id_bound(), b.id_bound());
    FrontierPolicy policy;
    policy.dense_threshold = 0;
    FrontierAccumulator acc(universe, policy);
    acc.add_set(a);
    acc.add_set(b);
    return std::move(acc).finish();
  }
  std::vector<EntityId> out;
  out.reserve(a.size() + b.size());
  const auto av = a.to_vector();
  const auto bv = b.to_vector();
  std::set_union(av.begin(), av.end(), bv.begin(), bv.end(), std::back_inserter(out));
  return EntitySet::from_sorted_unique(std::move(out));
}

EntitySet set_intersection(const EntitySet& a, const EntitySet& b) {
  std::vector<EntityId> out;
  const EntitySet& small = a.size() <= b.size() ? a : b;
  const EntitySet& large = a.size() <= b.size() ? b : a;
  small.for_each([&](EntityId id) {
    if (large.contains(id)) out.push_back(id);
  });
  return EntitySet::from_sorted_unique(std::move(out));
}

void FrontierAccumulator::add(EntityId id) {
  if (is_dense_) {
    if (id >= dense_.universe()) dense_.grow(static_cast<std::size_t>(id) + 1);
    dense_.set(id);
    return;
  }
  sparse_.push_back(id);
  if (sparse_.size() >= policy_.dense_threshold && sparse_.size() > 0) densify();
}

void FrontierAccumulator::add_all(std::span<const EntityId> ids) {
  if (!is_dense_ && sparse_.size() + ids.size() >= policy_.dense_threshold &&
      sparse_.size() + ids.size() > 0) {
    densify();
  }
  if (is_dense_) {
    for (EntityId id : ids) {
      if (id >= dense_.universe()) dense_.grow(static_cast<std::size_t>(id) + 1);
      dense_.set(id);
    }
  } else {
    sparse_.insert(sparse_.end(), ids.begin(), ids.end());
  }
}

void FrontierAccumulator::add_set(const EntitySet& set) {
  if (const Bitset* other = set.dense_bits()) {
    if (!is_dense_) densify();
    dense_.grow(other->universe());
    kernels::bitset_or(dense_.words(), other->words());
    return;
  }
  set.for_each([&](EntityId id) { add(id); });
}

void FrontierAccumulator::densify() {
  if (is_dense_) return;
  std::size_t universe = universe_;
  for (EntityId id : sparse_) universe = std::max(universe, static_cast<std::size_t>(id) + 1);
  dense_ = Bitset(universe);
  for (EntityId id : sparse_) dense_.set(id);
  sparse_.clear();
  sparse_.shrink_to_fit();
  is_dense_ = true;
}

EntitySet FrontierAccumulator::finish() && {
  if (is_dense_) {
    EntitySet result(std::move(dense_));
    // A bitset that ended up small is handed back as an array.
    if (result.size() < policy_.dense_threshold) return result.normalized(universe_, policy_);
    return result;
  }
  return EntitySet(std::move(sparse_));
}

}  // namespace kgseek
