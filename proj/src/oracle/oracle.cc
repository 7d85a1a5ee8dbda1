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

#include "oracle/oracle.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace kgseek::oracle {
namespace {

using Adjacency = std::vector<std::vector<std::pair<RelationId, EntityId>>>;

Adjacency adjacency(const KnowledgeGraph& g) {
  Adjacency adj(g.num_entities());
  for (const Triple& t : g.edges()) adj[t.subject].push_back({t.relation, t.object});
  return adj;
}

std::vector<EntityId> sorted_unique(std::vector<EntityId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

PathEndpoints enumerate_paths(const KnowledgeGraph& g, const EntitySet& anchors,
                              std::size_t max_len) {
  const Adjacency adj = adjacency(g);
  PathEndpoints out;
  std::vector<RelationId> labels;
  std::function<void(EntityId)> walk = [&](EntityId v) {
    out[labels].push_back(v);
    if (labels.size() == max_len) return;
    for (const auto& [r, w] : adj[v]) {
      labels.push_back(r);
      walk(w);
      labels.pop_back();
    }
  };
  for (EntityId a : anchors.to_vector()) walk(a);
  for (auto& [seq, ends] : out) ends = sorted_unique(std::move(ends));
  return out;
}

std::vector<EntityId> path_reach(const KnowledgeGraph& g, const EntitySet& anchors,
                                 std::span<const RelationId> hops) {
  const Adjacency adj = adjacency(g);
  std::vector<EntityId> ends;
  std::function<void(EntityId, std::size_t)> walk = [&](EntityId v, std::size_t i) {
    if (i == hops.size()) {
      ends.push_back(v);
      return;
    }
    for (const auto& [r, w] : adj[v]) {
      if (r == hops[i]) walk(w, i + 1);
    }
  };
  for (EntityId a : anchors.to_vector()) walk(a, 0);
  return sorted_unique(std::move(ends));
}

std::vector<ScoredSeq> exhaustive_top_k(const KnowledgeGraph& g, const EntitySet& anchors,
                                        std::span<const std::string> question,
                                        const EdgeScorer& scorer, std::size_t max_steps,
                                        std::size_t k) {
  const Adjacency adj = adjacency(g);
  std::vector<ScoredSeq> leaves;
  std::function<void(const ScoredSeq&, std::size_t)> expand = [&](const ScoredSeq& cur,
                                                                   std::size_t t) {
    if (t > max_steps) {
      leaves.push_back(cur);
      return;
    }
    if (t > 1 && cur.seq.back() == kSelfRelation) {
      expand(cur, t + 1);
      return;
    }
    std::vector<RelationId> options;
    for (EntityId v : cur.frontier) {
      for (const auto& [r, w] : adj[v]) options.push_back(r);
    }
    std::sort(options.begin(), options.end());
    options.erase(std::unique(options.begin(), options.end()), options.end());
    if (t > 1) options.insert(options.begin(), kSelfRelation);
    if (options.empty()) return;
    const std::vector<double> probs = scorer.score({question, cur.seq, options});
    for (std::size_t j = 0; j < options.size(); ++j) {
      if (probs[j] <= 0.0) continue;
      ScoredSeq next{cur.seq.extended(options[j]), cur.nll - std::log(probs[j]), {}};
      if (options[j] == kSelfRelation) {
        next.frontier = cur.frontier;
      } else {
        std::vector<EntityId> ends;
        for (EntityId v : cur.frontier) {
          for (const auto& [r, w] : adj[v]) {
            if (r == options[j]) ends.push_back(w);
          }
        }
        next.frontier = sorted_unique(std::move(ends));
      }
      expand(next, t + 1);
    }
  };
  expand({RelationSeq(), 0.0, anchors.to_vector()}, 1);
  std::sort(leaves.begin(), leaves.end(), [](const ScoredSeq& a, const ScoredSeq& b) {
    if (a.nll != b.nll) return a.nll < b.nll;
    return a.seq < b.seq;
  });
  if (leaves.size() > k) leaves.resize(k);
  return leaves;
}

std::vector<RelationSeq> exhaustive_weak_labels(const KnowledgeGraph& g, const EntitySet& anchors,
                                                const EntitySet& answers, std::size_t max_len) {
  const std::vector<EntityId> want = answers.to_vector();
  std::size_t best = SIZE_MAX;
  std::vector<RelationSeq> out;
  for (const auto& [labels, ends] : enumerate_paths(g, anchors, max_len)) {
    if (!std::includes(ends.begin(), ends.end(), want.begin(), want.end())) continue;
    if (ends.size() < best) {
      best = ends.size();
      out.clear();
    }
    if (ends.size() == best) out.push_back(RelationSeq::from_hops(labels));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> RandomScorer::score(const ScoreRequest& req) const {
  std::uint64_t h = mix(seed_);
  for (RelationId r : req.prefix.relations()) h = mix(h ^ r);
  std::vector<double> w(req.options.size());
  double total = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const std::uint64_t x = mix(h ^ (std::uint64_t{req.options[j]} << 32));
    w[j] = 0.05 + static_cast<double>(x >> 11) * 0x1.0p-53;
    total += w[j];
  }
  for (double& p : w) p /= total;
  return w;
}

KnowledgeGraph random_graph(std::size_t n_entities, std::size_t n_relations, std::size_t n_edges,
                            std::uint64_t seed, bool add_inverses) {
  std::mt19937_64 rng(seed);
  GraphBuilder b(add_inverses);
  for (std::size_t i = 0; i < n_entities; ++i) b.add_entity("n" + std::to_string(i));
  std::vector<RelationId> rels;
  for (std::size_t r = 0; r < n_relations; ++r) rels.push_back(b.add_relation("p" + std::to_string(r)));
  std::uniform_int_distribution<std::size_t> ent(0, n_entities - 1);
  std::uniform_int_distribution<std::size_t> rel(0, n_relations - 1);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const auto s = static_cast<EntityId>(ent(rng));
    const RelationId r = rels[rel(rng)];
    b.add_edge(s, r, static_cast<EntityId>(ent(rng)));
  }
  return std::move(b).build();
}

}  // namespace kgseek::oracle
