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
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "kgseek/entity_set.h"

namespace kgseek {
namespace {

constexpr std::size_t kUniverse = 700;

std::vector<EntityId> random_ids(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<EntityId> pick(0, kUniverse - 1);
  std::vector<EntityId> out(n);
  for (auto& x : out) x = pick(rng);
  return out;
}

EntitySet as_dense(const EntitySet& s) { return s.normalized(kUniverse, FrontierPolicy{1}); }

TEST(EntitySet, ConstructorSortsAndDeduplicates) {
  EntitySet s(std::vector<EntityId>{5, 1, 5, 3, 1});
  EXPECT_EQ(s.to_vector(), (std::vector<EntityId>{1, 3, 5}));
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.id_bound(), 6u);
  EXPECT_FALSE(s.is_dense());
}

TEST(EntitySet, EmptySet) {
  EntitySet s;
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.id_bound(), 0u);
  EXPECT_TRUE(s.is_subset_of(EntitySet{1, 2}));
  EXPECT_EQ(s, as_dense(s));
}

TEST(EntitySet, NormalizationSwitchesAtThreshold) {
  std::vector<EntityId> v(10);
  for (EntityId i = 0; i < 10; ++i) v[i] = i * 3;
  EntitySet s(v);
  EXPECT_TRUE(s.normalized(kUniverse, FrontierPolicy{10}).is_dense());
  EXPECT_FALSE(s.normalized(kUniverse, FrontierPolicy{11}).is_dense());
  EXPECT_FALSE(as_dense(s).normalized(kUniverse, FrontierPolicy{11}).is_dense());
}

// Every operation must give the same answer whichever representation each
// operand uses, and match std::set as an independent model.
TEST(EntitySet, RepresentationIndependenceAgainstStdSet) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    auto va = random_ids(rng, rng() % 80);
    auto vb = random_ids(rng, rng() % 80);
    std::set<EntityId> ma(va.begin(), va.end()), mb(vb.begin(), vb.end());
    std::vector<EntityId> mu, mi;
    std::set_union(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(mu));
    std::set_intersection(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(mi));
    const bool subset = std::includes(mb.begin(), mb.end(), ma.begin(), ma.end());

    const EntitySet sa(va), sb(vb);
    for (const EntitySet& a : {sa, as_dense(sa)}) {
      for (const EntitySet& b : {sb, as_dense(sb)}) {
        EXPECT_EQ(set_union(a, b).to_vector(), mu);
        EXPECT_EQ(set_intersection(a, b).to_vector(), mi);
        EXPECT_EQ(a.intersection_size(b), mi.size());
        EXPECT_EQ(a.is_subset_of(b), subset);
        EXPECT_EQ(a == b, ma == mb);
      }
      EXPECT_EQ(a.size(), ma.size());
      std::vector<EntityId> visited;
      a.for_each([&](EntityId id) { visited.push_back(id); });
      EXPECT_EQ(visited, std::vector<EntityId>(ma.begin(), ma.end()));
      for (EntityId probe = 0; probe < kUniverse; probe += 37) {
        EXPECT_EQ(a.contains(probe), ma.count(probe) == 1);
      }
    }
  }
}

TEST(FrontierAccumulator, MatchesSetUnionAcrossThresholds) {
  std::mt19937_64 rng(5);
  for (std::size_t threshold : {std::size_t{1}, std::size_t{16}, kDefaultDenseThreshold}) {
    for (int trial = 0; trial < 50; ++trial) {
      FrontierAccumulator acc(kUniverse, FrontierPolicy{threshold});
      std::set<EntityId> model;
      for (int chunk = 0; chunk < 5; ++chunk) {
        auto v = random_ids(rng, rng() % 30);
        model.insert(v.begin(), v.end());
        if (chunk % 2 == 0) {
          acc.add_all(v);
        } else {
          acc.add_set(EntitySet(v));
        }
      }
      acc.add(3);
      model.insert(3);
      EntitySet out = std::move(acc).finish();
      EXPECT_EQ(out.to_vector(), std::vector<EntityId>(model.begin(), model.end()));
      EXPECT_EQ(out.is_dense(), out.size() >= threshold) << threshold;
    }
  }
}

}  // namespace
}  // namespace kgseek
