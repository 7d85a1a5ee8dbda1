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

#include "oracle/verify_suites.h"

#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <random>

#include "kgseek/coalesce.h"
#include "kgseek/epfo.h"
#include "kgseek/seeker.h"
#include "kgseek/trainer.h"
#include "oracle/oracle.h"

namespace kgseek::oracle {
namespace {

using Clock = std::chrono::steady_clock;

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

EntitySet random_anchors(std::mt19937_64& rng, std::size_t n_entities, std::size_t max_count) {
  std::vector<EntityId> ids;
  const std::size_t count = pick(rng, 1, max_count);
  for (std::size_t i = 0; i < count; ++i) ids.push_back(static_cast<EntityId>(pick(rng, 0, n_entities - 1)));
  return EntitySet(std::move(ids));
}

std::uint64_t case_seed(std::uint64_t root, std::size_t i) {
  return root * 1000003ULL + i;
}

// All hop sequences over relation ids 1..n_rel of length <= max_len.
void for_each_sequence(std::size_t n_rel, std::size_t max_len,
                       const std::function<void(const std::vector<RelationId>&)>& fn) {
  std::vector<RelationId> cur;
  std::function<void()> rec = [&] {
    fn(cur);
    if (cur.size() == max_len) return;
    for (RelationId r = 1; r <= n_rel; ++r) {
      cur.push_back(r);
      rec();
      cur.pop_back();
    }
  };
  rec();
}

template <typename Body>
SuiteResult run_suite(std::string name, std::string unit, std::size_t cases,
                      const SuiteOptions& options, Body body) {
  SuiteResult result;
  result.name = std::move(name);
  result.unit = std::move(unit);
  result.total = cases;
  const auto start = Clock::now();
  for (std::size_t i = 0; i < cases; ++i) {
    const std::uint64_t seed = case_seed(options.seed, i);
    std::string failure = body(seed, options.inject_fault && i == 0);
    if (failure.empty()) {
      ++result.passed;
    } else {
      result.failures.push_back("seed " + std::to_string(seed) + ": " + failure);
    }
  }
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace

std::string SuiteResult::summary() const {
  return name + ": " + std::to_string(passed) + "/" + std::to_string(total) + " " + unit;
}

SuiteResult coalesce_suite(const SuiteOptions& options) {
  const std::size_t cases = options.cases ? options.cases : 200;
  return run_suite("coalesce", "matched", cases, options, [](std::uint64_t seed, bool fault) {
    std::mt19937_64 rng(seed);
    const std::size_t n = pick(rng, 2, 200);
    const std::size_t n_rel = pick(rng, 1, 10);
    const std::size_t n_edges = pick(rng, 0, 2000);
    const KnowledgeGraph g = random_graph(n, n_rel, n_edges, seed);
    const EntitySet anchors = random_anchors(rng, n, 3);
    const PathEndpoints paths = enumerate_paths(g, anchors, 3);

    std::string failure;
    bool first = true;
    for_each_sequence(n_rel, 3, [&](const std::vector<RelationId>& hops) {
      if (!failure.empty()) return;
      std::vector<EntityId> got = reach(g, anchors, RelationSeq::from_hops(hops)).to_vector();
      if (fault && first && !hops.empty()) {
        got.push_back(static_cast<EntityId>(n));  // an id that cannot be reached
        first = false;
      }
      auto it = paths.find(hops);
      const std::vector<EntityId> want = it == paths.end() ? std::vector<EntityId>{} : it->second;
      if (got != want) {
        failure = "reach mismatch for sequence of " + std::to_string(hops.size()) + " hops";
      }
    });
    if (!failure.empty()) return failure;

    const auto sets = enumerate_reachable_sets(g, anchors, 3);
    if (sets.size() != paths.size()) {
      return "enumerate_reachable_sets returned " + std::to_string(sets.size()) +
             " sets, oracle found " + std::to_string(paths.size());
    }
    for (const ReachableSet& rs : sets) {
      auto it = paths.find(rs.seq.hop_relations());
      if (it == paths.end() || it->second != rs.members.to_vector()) {
        return std::string("enumerate_reachable_sets disagrees with path enumeration");
      }
    }
    return std::string();
  });
}

SuiteResult beam_suite(const SuiteOptions& options) {
  const std::size_t cases = options.cases ? options.cases : 200;
  return run_suite("beam", "exact", cases, options, [](std::uint64_t seed, bool fault) {
    std::mt19937_64 rng(seed);
    const std::size_t n = pick(rng, 2, 30);
    const std::size_t n_rel = pick(rng, 1, 3);
    const KnowledgeGraph g = random_graph(n, n_rel, pick(rng, 1, 4 * n), seed);
    const EntitySet anchors = random_anchors(rng, n, 2);
    SeekParams params;
    params.max_steps = pick(rng, 1, 3);
    params.beam_width = static_cast<std::size_t>(std::pow(n_rel + 1, params.max_steps));
    params.top_k = pick(rng, 1, params.beam_width);
    const std::vector<std::string> question{"q"};

    const RandomScorer random(seed);
    const UniformScorer uniform;
    const EdgeScorer& scorer = seed % 2 == 0 ? static_cast<const EdgeScorer&>(random) : uniform;
    SeekResult got = seek(g, anchors, question, scorer, params);
    const auto want = exhaustive_top_k(g, anchors, question, scorer, params.max_steps,
                                       params.top_k);
    if (fault && !got.entries.empty()) got.entries.front().nll += 1.0;
    if (got.entries.size() != want.size()) {
      return "entry count " + std::to_string(got.entries.size()) + " vs exhaustive " +
             std::to_string(want.size());
    }
    for (std::size_t i = 0; i < want.size(); ++i) {
      const BeamEntry& e = got.entries[i];
      if (e.seq != want[i].seq) return "rank " + std::to_string(i + 1) + ": sequence differs";
      if (std::abs(e.nll - want[i].nll) > 1e-9) return "rank " + std::to_string(i + 1) + ": nll differs";
      if (e.frontier.to_vector() != want[i].frontier) {
        return "rank " + std::to_string(i + 1) + ": frontier differs";
      }
    }
    return std::string();
  });
}

SuiteResult prop1_suite(const SuiteOptions& options) {
  const std::size_t cases = options.cases ? options.cases : 1000;
  return run_suite("prop1", "contained", cases, options, [](std::uint64_t seed, bool fault) {
    std::mt19937_64 rng(seed);
    const std::size_t n = pick(rng, 5, 40);
    const std::size_t n_rel = pick(rng, 1, 5);
    const KnowledgeGraph g = random_graph(n, n_rel, pick(rng, n, 4 * n), seed, seed % 3 == 0);
    const DnfQuery q = random_query(g, 3, 3, seed);
    const ValidityReport report = validate(g, q);
    if (!report) return "generated query invalid: " + report.reason;
    const auto seqs = cover_sequences(g, q);
    if (seqs.size() > q.n_or() + 1) {
      return std::to_string(seqs.size()) + " sequences for n_or = " + std::to_string(q.n_or());
    }
    const EntitySet anchors = q.anchor_entities();
    EntitySet covered;
    for (const RelationSeq& s : seqs) covered = set_union(covered, reach(g, anchors, s));
    EntitySet answers = evaluate(g, q);
    if (fault) {
      std::vector<EntityId> extra = answers.to_vector();
      extra.push_back(static_cast<EntityId>(g.num_entities()));
      answers = EntitySet(std::move(extra));
    }
    if (!answers.is_subset_of(covered)) {
      return "denotation not contained in cover (" + std::to_string(answers.size()) +
             " answers, " + std::to_string(covered.size()) + " covered)";
    }
    return std::string();
  });
}

SuiteResult weak_label_suite(const SuiteOptions& options) {
  const std::size_t cases = options.cases ? options.cases : 100;
  return run_suite("weak_labels", "matched", cases, options, [](std::uint64_t seed, bool fault) {
    std::mt19937_64 rng(seed);
    const std::size_t n = pick(rng, 3, 40);
    const std::size_t n_rel = pick(rng, 1, 4);
    const KnowledgeGraph g = random_graph(n, n_rel, pick(rng, n, 4 * n), seed, seed % 2 == 0);
    const std::size_t max_len = pick(rng, 0, 3);
    QAExample ex;
    ex.anchors = random_anchors(rng, n, 2);
    // Answers: a random subset of some reachable set, or random nodes.
    const PathEndpoints paths = enumerate_paths(g, ex.anchors, max_len);
    std::vector<EntityId> answers;
    if (pick(rng, 0, 3) > 0) {
      auto it = paths.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(pick(rng, 0, paths.size() - 1)));
      for (EntityId v : it->second) {
        if (answers.empty() || pick(rng, 0, 1)) answers.push_back(v);
      }
    } else {
      const std::size_t count = pick(rng, 1, 3);
      for (std::size_t i = 0; i < count; ++i) answers.push_back(static_cast<EntityId>(pick(rng, 0, n - 1)));
    }
    ex.answers = EntitySet(std::move(answers));
    std::vector<RelationSeq> got = weak_labels(g, ex, max_len);
    std::sort(got.begin(), got.end());
    if (fault) got.push_back(RelationSeq());
    const auto want = exhaustive_weak_labels(g, ex.anchors, ex.answers, max_len);
    if (got != want) {
      return "got " + std::to_string(got.size()) + " sequences, oracle " +
             std::to_string(want.size());
    }
    return std::string();
  });
}

}  // namespace kgseek::oracle
