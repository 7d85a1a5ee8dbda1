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

// Synthetic knowledge graphs and questions, and the benchmark runners built
// on them: seek throughput, preprocessing cost, precision/recall of the top-k
// sequences, and coalescing compression.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kgseek/kg_store.h"
#include "kgseek/qa_dataset.h"
#include "kgseek/scorer.h"
#include "kgseek/seeker.h"

namespace kgseek {

// Every node has one outgoing edge per relation, to a uniformly random
// entity. Entities are named e<i>, relations r<i>.
struct SynthSpec {
  std::size_t n_entities = 1000;
  std::size_t n_relations = 10;
  std::uint64_t seed = 1;
  std::size_t answer_hops = 2;
  std::size_t n_questions = 0;
};

struct SynthData {
  KnowledgeGraph graph;
  std::vector<QAExample> examples;
};

// Questions read "what is r_h of ... of r_1 of e<anchor>" and their single
// answer lies exactly answer_hops edges from the anchor. Throws
// PreconditionError for unsatisfiable specs.
SynthData gen_synthetic(const SynthSpec& spec);

// Typed schema graph: entities are partitioned into types, each relation has
// a domain and a range type, and every entity has `fanout` distinct targets
// for each relation of its type. Many parallel same-label edges make
// coalescing effective.
struct TypedSpec {
  std::size_t n_types = 4;
  std::size_t entities_per_type = 250;
  std::size_t relations_per_type = 3;
  std::size_t fanout = 4;
  std::uint64_t seed = 1;
};
KnowledgeGraph gen_typed(const TypedSpec& spec);

// Refinement task. For each episode, hub a<i> links to m candidates by
// "member"; hub b<i> links to the answers by the filter relation named in the
// question and to every other candidate by a different filter relation.
// Relation-following from a alone overshoots to all m candidates. The graph
// carries inverse relations; each example's gold sequence is (self, member).
struct IntersectionSpec {
  std::size_t n_episodes = 300;
  std::size_t min_candidates = 4;
  std::size_t max_candidates = 8;
  std::size_t n_filters = 4;
  std::uint64_t seed = 1;
};
SynthData gen_intersection(const IntersectionSpec& spec);

// Scorer used for the example at a given index.
using ScorerFor = std::function<const EdgeScorer&(std::size_t)>;

// One OracleScorer per example, built from the examples' gold sequences.
class OracleScorers {
 public:
  explicit OracleScorers(std::span<const QAExample> examples);
  const EdgeScorer& operator()(std::size_t i) const { return scorers_.at(i); }
  ScorerFor as_function() const {
    return [this](std::size_t i) -> const EdgeScorer& { return (*this)(i); };
  }

 private:
  std::vector<OracleScorer> scorers_;
};

struct ThroughputRow {
  std::string mode;  // "sequential" or "parallel"
  std::size_t n_entities = 0;
  std::size_t n_relations = 0;  // excluding self
  std::size_t n_edges = 0;
  std::size_t queries = 0;
  double wall_seconds = 0.0;
  double queries_per_second = 0.0;
  double scorer_calls_mean = 0.0;
  std::size_t scorer_calls_max = 0;
  std::size_t scorer_call_bound = 0;
  // Queries whose scorer_calls exceeded the bound; checked on every query.
  std::size_t bound_violations = 0;
};

// Runs `warmup` untimed queries, then `iters` timed queries cycling through
// the examples one at a time. With workers > 1 the timed queries are spread
// over a thread pool and the row is marked "parallel".
ThroughputRow bench_throughput(const KnowledgeGraph& g, std::span<const QAExample> examples,
                               const ScorerFor& scorer, const SeekParams& params,
                               std::size_t warmup, std::size_t iters, std::size_t workers = 1);

struct PreprocessRow {
  std::size_t query = 0;
  std::string method;  // "two_hop" or "coalesced"
  std::size_t nodes_touched = 0;
  std::size_t options_touched = 0;
  double seconds = 0.0;
};

// Per example: full 2-hop out-neighbourhood extraction versus the coalesced
// search setup (the anchor frontier and its outgoing relations).
std::vector<PreprocessRow> bench_preprocessing(const KnowledgeGraph& g,
                                               std::span<const QAExample> examples);

struct PrecisionRecallRow {
  std::size_t k = 0;
  double precision = 0.0;
  double recall = 0.0;
};

// Candidates for k are the union of the top-k sequences' reach sets; one seek
// per example with top_k = k_max; the beam is widened to k_max when narrower.
std::vector<PrecisionRecallRow> precision_recall_at_k(const KnowledgeGraph& g,
                                                      std::span<const QAExample> examples,
                                                      const ScorerFor& scorer,
                                                      const SeekParams& params,
                                                      std::size_t k_max);

struct CompressionRow {
  std::string graph;
  std::size_t length = 0;
  std::uint64_t original_paths = 0;
  std::uint64_t coalesced_paths = 0;
};

// Path counts summed over single-anchor queries from `n_anchors` entities
// chosen by seed.
std::vector<CompressionRow> compression_stats(const KnowledgeGraph& g, const std::string& label,
                                              std::size_t n_anchors, std::size_t max_len,
                                              std::uint64_t seed);

struct EdgeSweepRow {
  std::size_t n_entities = 0;
  std::size_t n_relations = 0;
  std::size_t n_edges = 0;
  double two_hop_seconds = 0.0;    // mean per query
  double coalesced_seconds = 0.0;  // mean per query, setup plus seek
};

struct SweepConfig {
  std::vector<std::size_t> entity_sizes{100, 1000, 10000, 100000};
  std::size_t fixed_relations = 10;
  std::vector<std::size_t> relation_sizes{1, 10, 100};
  std::size_t fixed_entities = 5000;
  std::size_t n_questions = 200;
  std::size_t warmup = 50;
  std::size_t iters = 2000;
  std::size_t workers = 1;
  SeekParams params;
  std::uint64_t seed = 1;
};

struct SweepReport {
  std::vector<ThroughputRow> entity_sweep;    // fixed |R|
  std::vector<ThroughputRow> relation_sweep;  // fixed |V|
  std::vector<EdgeSweepRow> edge_sweep;
};

// Oracle-scored throughput sweeps over synthetic graphs. The edge sweep
// reuses the entity-sweep graphs.
SweepReport run_sweeps(const SweepConfig& config);

// CSV writers. Each file starts with "# seed=<seed>" and a header row.
void write_throughput_csv(std::ostream& out, std::uint64_t seed,
                          std::span<const ThroughputRow> rows, bool include_timing = true);
void write_preprocess_csv(std::ostream& out, std::uint64_t seed,
                          std::span<const PreprocessRow> rows, bool include_timing = true);
void write_precision_recall_csv(std::ostream& out, std::uint64_t seed, const std::string& label,
                                std::span<const PrecisionRecallRow> rows);
void write_compression_csv(std::ostream& out, std::uint64_t seed,
                           std::span<const CompressionRow> rows);
void write_edge_sweep_csv(std::ostream& out, std::uint64_t seed,
                          std::span<const EdgeSweepRow> rows);

}  // namespace kgseek
