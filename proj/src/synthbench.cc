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

#include "kgseek/synthbench.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "kgseek/coalesce.h"
#include "kgseek/errors.h"

namespace kgseek {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Nodes within fewer than `hops` edges of `anchor`, ignoring labels.
std::vector<char> closer_than(const KnowledgeGraph& g, EntityId anchor, std::size_t hops) {
  std::vector<char> seen(g.num_entities(), 0);
  std::vector<EntityId> layer{anchor};
  seen[anchor] = 1;
  for (std::size_t depth = 1; depth < hops && !layer.empty(); ++depth) {
    std::vector<EntityId> next;
    for (EntityId v : layer) {
      for (const Triple& t : g.out_edges(v)) {
        if (!seen[t.object]) {
          seen[t.object] = 1;
          next.push_back(t.object);
        }
      }
    }
    layer = std::move(next);
  }
  return seen;
}

void write_seed(std::ostream& out, std::uint64_t seed) { out << "# seed=" << seed << '\n'; }

}  // namespace

SynthData gen_synthetic(const SynthSpec& spec) {
  if (spec.n_entities < 1 || spec.n_relations < 1) {
    throw PreconditionError("gen_synthetic: need at least one entity and one relation");
  }
  if (spec.answer_hops < 1) throw PreconditionError("gen_synthetic: answer_hops must be >= 1");

  std::mt19937_64 rng(spec.seed);
  GraphBuilder builder(false);
  for (std::size_t i = 0; i < spec.n_entities; ++i) builder.add_entity("e" + std::to_string(i));
  std::vector<RelationId> rels;
  for (std::size_t r = 0; r < spec.n_relations; ++r) {
    rels.push_back(builder.add_relation("r" + std::to_string(r)));
  }
  builder.reserve_edges(spec.n_entities * spec.n_relations);
  for (std::size_t v = 0; v < spec.n_entities; ++v) {
    for (RelationId r : rels) {
      builder.add_edge(static_cast<EntityId>(v), r,
                       static_cast<EntityId>(uniform_index(rng, spec.n_entities)));
    }
  }
  SynthData data{std::move(builder).build(), {}};
  const KnowledgeGraph& g = data.graph;

  constexpr std::size_t kMaxAttempts = 1000;
  for (std::size_t q = 0; q < spec.n_questions; ++q) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const auto anchor = static_cast<EntityId>(uniform_index(rng, spec.n_entities));
      std::vector<RelationId> hops;
      EntityId cur = anchor;
      for (std::size_t h = 0; h < spec.answer_hops; ++h) {
        const RelationId r = rels[uniform_index(rng, rels.size())];
        hops.push_back(r);
        cur = g.out_neighbors(cur, r).front();
      }
      if (closer_than(g, anchor, spec.answer_hops)[cur]) continue;

      QAExample ex;
      ex.question = {"what", "is"};
      for (std::size_t h = hops.size(); h-- > 0;) {
        ex.question.push_back(g.relation_name(hops[h]));
        ex.question.push_back("of");
      }
      ex.question.push_back(g.entity_name(anchor));
      ex.anchors = EntitySet{anchor};
      ex.answers = EntitySet{cur};
      ex.gold_sequences.push_back(RelationSeq::from_hops(hops));
      data.examples.push_back(std::move(ex));
      placed = true;
    }
    if (!placed) {
      throw PreconditionError("gen_synthetic: no answer exactly " +
                              std::to_string(spec.answer_hops) + " hops away after " +
                              std::to_string(kMaxAttempts) + " attempts");
    }
  }
  return data;
}

KnowledgeGraph gen_typed(const TypedSpec& spec) {
  if (spec.n_types < 1 || spec.entities_per_type < 1 || spec.relations_per_type < 1) {
    throw PreconditionError("gen_typed: all sizes must be positive");
  }
  if (spec.fanout < 1 || spec.fanout > spec.entities_per_type) {
    throw PreconditionError("gen_typed: fanout must be in [1, entities_per_type]");
  }
  std::mt19937_64 rng(spec.seed);
  GraphBuilder builder(false);
  const std::size_t per = spec.entities_per_type;
  for (std::size_t t = 0; t < spec.n_types; ++t) {
    for (std::size_t i = 0; i < per; ++i) {
      builder.add_entity("t" + std::to_string(t) + "_" + std::to_string(i));
    }
  }
  std::vector<std::size_t> pool(per);
  for (std::size_t t = 0; t < spec.n_types; ++t) {
    for (std::size_t j = 0; j < spec.relations_per_type; ++j) {
      const std::size_t range = uniform_index(rng, spec.n_types);
      const RelationId r = builder.add_relation("t" + std::to_string(t) + "_rel" +
                                                std::to_string(j) + "_t" + std::to_string(range));
      for (std::size_t i = 0; i < per; ++i) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        // Partial Fisher-Yates: the first `fanout` slots are distinct targets.
        for (std::size_t f = 0; f < spec.fanout; ++f) {
          std::swap(pool[f], pool[f + uniform_index(rng, per - f)]);
          builder.add_edge(static_cast<EntityId>(t * per + i), r,
                           static_cast<EntityId>(range * per + pool[f]));
        }
      }
    }
  }
  return std::move(builder).build();
}

SynthData gen_intersection(const IntersectionSpec& spec) {
  if (spec.min_candidates < 2 || spec.max_candidates < spec.min_candidates) {
    throw PreconditionError("gen_intersection: need 2 <= min_candidates <= max_candidates");
  }
  if (spec.n_filters < 2) throw PreconditionError("gen_intersection: need at least 2 filters");
  std::mt19937_64 rng(spec.seed);
  GraphBuilder builder(true);
  const RelationId member = builder.add_relation("member");
  std::vector<RelationId> filters;
  for (std::size_t f = 0; f < spec.n_filters; ++f) {
    filters.push_back(builder.add_relation("f" + std::to_string(f)));
  }

  struct Pending {
    EntityId a, b;
    std::size_t filter;
    std::vector<EntityId> answers;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < spec.n_episodes; ++i) {
    const std::string id = std::to_string(i);
    Pending p{builder.add_entity("a" + id), builder.add_entity("b" + id),
              uniform_index(rng, filters.size()), {}};
    const std::size_t m =
        spec.min_candidates + uniform_index(rng, spec.max_candidates - spec.min_candidates + 1);
    const std::size_t n_answers = 1 + uniform_index(rng, m - 1);
    for (std::size_t j = 0; j < m; ++j) {
      const EntityId c = builder.add_entity("c" + id + "_" + std::to_string(j));
      builder.add_edge(p.a, member, c);
      if (j < n_answers) {
        builder.add_edge(p.b, filters[p.filter], c);
        p.answers.push_back(c);
      } else {
        std::size_t other = uniform_index(rng, filters.size() - 1);
        if (other >= p.filter) ++other;
        builder.add_edge(p.b, filters[other], c);
      }
    }
    pending.push_back(std::move(p));
  }
  SynthData data{std::move(builder).build(), {}};
  const KnowledgeGraph& g = data.graph;
  for (Pending& p : pending) {
    QAExample ex;
    ex.question = {"which", "member", "of", g.entity_name(p.a), "is",
                   g.relation_name(filters[p.filter]), "of", g.entity_name(p.b)};
    ex.anchors = EntitySet{p.a, p.b};
    ex.answers = EntitySet(std::move(p.answers));
    const RelationId hop = member;
    ex.gold_sequences.push_back(RelationSeq::from_hops({&hop, 1}));
    data.examples.push_back(std::move(ex));
  }
  return data;
}

OracleScorers::OracleScorers(std::span<const QAExample> examples) {
  scorers_.reserve(examples.size());
  for (const QAExample& ex : examples) scorers_.emplace_back(ex.gold_sequences);
}

ThroughputRow bench_throughput(const KnowledgeGraph& g, std::span<const QAExample> examples,
                               const ScorerFor& scorer, const SeekParams& params,
                               std::size_t warmup, std::size_t iters, std::size_t workers) {
  if (iters < 1) throw PreconditionError("bench_throughput: iters must be >= 1");
  if (examples.empty()) throw PreconditionError("bench_throughput: 0 examples");
  ThroughputRow row;
  row.mode = workers > 1 ? "parallel" : "sequential";
  row.n_entities = g.num_entities();
  row.n_relations = g.num_relations() - 1;
  row.n_edges = g.num_edges();
  row.queries = iters;
  row.scorer_call_bound = scorer_call_bound(g, params);

  auto run_one = [&](std::size_t i) {
    const QAExample& ex = examples[i % examples.size()];
    return seek(g, ex.anchors, ex.question, scorer(i % examples.size()), params).scorer_calls;
  };
  for (std::size_t i = 0; i < warmup; ++i) run_one(i);

  std::size_t total_calls = 0;
  const auto start = Clock::now();
  if (workers <= 1) {
    for (std::size_t i = 0; i < iters; ++i) {
      const std::size_t calls = run_one(i);
      total_calls += calls;
      row.scorer_calls_max = std::max(row.scorer_calls_max, calls);
      if (calls > row.scorer_call_bound) ++row.bound_violations;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        std::size_t local_total = 0, local_max = 0, local_violations = 0;
        for (std::size_t i = next++; i < iters; i = next++) {
          const std::size_t calls = run_one(i);
          local_total += calls;
          local_max = std::max(local_max, calls);
          if (calls > row.scorer_call_bound) ++local_violations;
        }
        std::lock_guard lock(mu);
        total_calls += local_total;
        row.scorer_calls_max = std::max(row.scorer_calls_max, local_max);
        row.bound_violations += local_violations;
      });
    }
    for (std::thread& t : pool) t.join();
  }
  row.wall_seconds = seconds_since(start);
  row.queries_per_second = static_cast<double>(iters) / row.wall_seconds;
  row.scorer_calls_mean = static_cast<double>(total_calls) / static_cast<double>(iters);
  return row;
}

std::vector<PreprocessRow> bench_preprocessing(const KnowledgeGraph& g,
                                               std::span<const QAExample> examples) {
  std::vector<PreprocessRow> rows;
  std::vector<char> seen(g.num_entities(), 0);
  std::vector<EntityId> touched;
  for (std::size_t q = 0; q < examples.size(); ++q) {
    const QAExample& ex = examples[q];

    PreprocessRow two_hop{q, "two_hop", 0, 0, 0.0};
    auto start = Clock::now();
    std::vector<EntityId> layer;
    ex.anchors.for_each([&](EntityId v) {
      if (!seen[v]) {
        seen[v] = 1;
        touched.push_back(v);
        layer.push_back(v);
      }
    });
    for (int depth = 0; depth < 2; ++depth) {
      std::vector<EntityId> next;
      for (EntityId v : layer) {
        const auto edges = g.out_edges(v);
        two_hop.options_touched += edges.size();
        for (const Triple& t : edges) {
          if (!seen[t.object]) {
            seen[t.object] = 1;
            touched.push_back(t.object);
            next.push_back(t.object);
          }
        }
      }
      layer = std::move(next);
    }
    two_hop.seconds = seconds_since(start);
    two_hop.nodes_touched = touched.size();
    for (EntityId v : touched) seen[v] = 0;
    touched.clear();

    PreprocessRow coalesced{q, "coalesced", 0, 0, 0.0};
    start = Clock::now();
    coalesced.options_touched = g.outgoing_relations(ex.anchors).size();
    coalesced.seconds = seconds_since(start);
    coalesced.nodes_touched = ex.anchors.size();

    rows.push_back(std::move(two_hop));
    rows.push_back(std::move(coalesced));
  }
  return rows;
}

std::vector<PrecisionRecallRow> precision_recall_at_k(const KnowledgeGraph& g,
                                                      std::span<const QAExample> examples,
                                                      const ScorerFor& scorer,
                                                      const SeekParams& params,
                                                      std::size_t k_max) {
  if (k_max < 1) throw PreconditionError("precision_recall_at_k: k_max must be >= 1");
  if (examples.empty()) throw PreconditionError("precision_recall_at_k: 0 examples");
  SeekParams p = params;
  p.top_k = k_max;
  p.beam_width = std::max(p.beam_width, k_max);

  std::vector<PrecisionRecallRow> rows(k_max);
  for (std::size_t k = 0; k < k_max; ++k) rows[k].k = k + 1;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const QAExample& ex = examples[i];
    const SeekResult r = seek(g, ex.anchors, ex.question, scorer(i), p);
    FrontierAccumulator acc(g.num_entities(), p.frontier);
    for (std::size_t k = 0; k < k_max; ++k) {
      if (k < r.entries.size()) acc.add_set(r.entries[k].frontier);
      // finish() consumes, so score a copy of the running union.
      FrontierAccumulator snapshot = acc;
      const EntitySet candidates = std::move(snapshot).finish();
      const double hit = static_cast<double>(candidates.intersection_size(ex.answers));
      if (!candidates.empty()) rows[k].precision += hit / static_cast<double>(candidates.size());
      rows[k].recall += hit / static_cast<double>(ex.answers.size());
    }
  }
  for (PrecisionRecallRow& row : rows) {
    row.precision /= static_cast<double>(examples.size());
    row.recall /= static_cast<double>(examples.size());
  }
  return rows;
}

std::vector<CompressionRow> compression_stats(const KnowledgeGraph& g, const std::string& label,
                                              std::size_t n_anchors, std::size_t max_len,
                                              std::uint64_t seed) {
  if (g.num_entities() == 0) throw PreconditionError("compression_stats: empty graph");
  std::mt19937_64 rng(seed);
  std::vector<CompressionRow> rows(max_len);
  for (std::size_t l = 0; l < max_len; ++l) rows[l] = {label, l + 1, 0, 0};
  for (std::size_t i = 0; i < n_anchors; ++i) {
    const auto anchor = static_cast<EntityId>(uniform_index(rng, g.num_entities()));
    const auto stats = path_count_stats(g, EntitySet{anchor}, max_len);
    for (const PathCountRow& s : stats) {
      CompressionRow& row = rows[s.length - 1];
      const std::uint64_t sum = row.original_paths + s.original_paths;
      row.original_paths = sum < row.original_paths ? UINT64_MAX : sum;
      row.coalesced_paths += s.coalesced_paths;
    }
  }
  return rows;
}

SweepReport run_sweeps(const SweepConfig& config) {
  SweepReport report;
  auto measure = [&](std::size_t n_entities, std::size_t n_relations, bool edges) {
    const SynthData data = gen_synthetic(
        {n_entities, n_relations, config.seed, 2, config.n_questions});
    const OracleScorers scorers(data.examples);
    std::vector<ThroughputRow> rows;
    rows.push_back(bench_throughput(data.graph, data.examples, scorers.as_function(),
                                    config.params, config.warmup, config.iters, 1));
    if (config.workers > 1) {
      rows.push_back(bench_throughput(data.graph, data.examples, scorers.as_function(),
                                      config.params, config.warmup, config.iters,
                                      config.workers));
    }
    if (edges) {
      EdgeSweepRow e{data.graph.num_entities(), n_relations, data.graph.num_edges(), 0.0, 0.0};
      const auto pre = bench_preprocessing(data.graph, data.examples);
      double setup = 0.0;
      for (const PreprocessRow& p : pre) (p.method == "two_hop" ? e.two_hop_seconds : setup) += p.seconds;
      const double n = static_cast<double>(data.examples.size());
      e.two_hop_seconds /= n;
      e.coalesced_seconds = setup / n + 1.0 / rows.front().queries_per_second;
      report.edge_sweep.push_back(e);
    }
    return rows;
  };
  for (std::size_t n : config.entity_sizes) {
    for (ThroughputRow& row : measure(n, config.fixed_relations, true)) {
      report.entity_sweep.push_back(std::move(row));
    }
  }
  for (std::size_t r : config.relation_sizes) {
    for (ThroughputRow& row : measure(config.fixed_entities, r, false)) {
      report.relation_sweep.push_back(std::move(row));
    }
  }
  return report;
}

void write_throughput_csv(std::ostream& out, std::uint64_t seed,
                          std::span<const ThroughputRow> rows, bool include_timing) {
  write_seed(out, seed);
  out << "mode,n_entities,n_relations,n_edges,queries,";
  if (include_timing) out << "wall_seconds,queries_per_second,";
  out << "scorer_calls_mean,scorer_calls_max,scorer_call_bound,bound_violations\n";
  for (const ThroughputRow& r : rows) {
    out << r.mode << ',' << r.n_entities << ',' << r.n_relations << ',' << r.n_edges << ','
        << r.queries << ',';
    if (include_timing) out << r.wall_seconds << ',' << r.queries_per_second << ',';
    out << r.scorer_calls_mean << ',' << r.scorer_calls_max << ',' << r.scorer_call_bound << ','
        << r.bound_violations << '\n';
  }
}

void write_preprocess_csv(std::ostream& out, std::uint64_t seed,
                          std::span<const PreprocessRow> rows, bool include_timing) {
  write_seed(out, seed);
  out << "query,method,nodes_touched,options_touched" << (include_timing ? ",seconds" : "")
      << '\n';
  for (const PreprocessRow& r : rows) {
    out << r.query << ',' << r.method << ',' << r.nodes_touched << ',' << r.options_touched;
    if (include_timing) out << ',' << r.seconds;
    out << '\n';
  }
}

void write_precision_recall_csv(std::ostream& out, std::uint64_t seed, const std::string& label,
                                std::span<const PrecisionRecallRow> rows) {
  write_seed(out, seed);
  out << "scorer,k,precision,recall\n";
  for (const PrecisionRecallRow& r : rows) {
    out << label << ',' << r.k << ',' << r.precision << ',' << r.recall << '\n';
  }
}

void write_compression_csv(std::ostream& out, std::uint64_t seed,
                           std::span<const CompressionRow> rows) {
  write_seed(out, seed);
  out << "graph,length,original_paths,coalesced_paths\n";
  for (const CompressionRow& r : rows) {
    out << r.graph << ',' << r.length << ',' << r.original_paths << ',' << r.coalesced_paths
        << '\n';
  }
}

void write_edge_sweep_csv(std::ostream& out, std::uint64_t seed,
                          std::span<const EdgeSweepRow> rows) {
  write_seed(out, seed);
  out << "n_entities,n_relations,n_edges,two_hop_seconds,coalesced_seconds\n";
  for (const EdgeSweepRow& r : rows) {
    out << r.n_entities << ',' << r.n_relations << ',' << r.n_edges << ',' << r.two_hop_seconds
        << ',' << r.coalesced_seconds << '\n';
  }
}

}  // namespace kgseek
