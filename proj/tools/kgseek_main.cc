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

// kgseek command-line driver.
//
// Exit codes: 0 success, 1 unexpected error, 2 bad input (missing files,
// malformed records, unknown names, invalid parameters), 3 scorer contract
// violation, 4 property or bound failure, 5 training diverged.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "kgseek/coalesce.h"
#include "kgseek/epfo.h"
#include "kgseek/errors.h"
#include "kgseek/featurized.h"
#include "kgseek/kernels.h"
#include "kgseek/kg_store.h"
#include "kgseek/qa_dataset.h"
#include "kgseek/refiner.h"
#include "kgseek/scorer.h"
#include "kgseek/seeker.h"
#include "kgseek/synthbench.h"
#include "kgseek/trainer.h"
#include "oracle/verify_suites.h"

namespace fs = std::filesystem;
using namespace kgseek;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kBadInput = 2, kContract = 3, kProperty = 4, kTraining = 5 };

struct Options {
  std::string graph;
  bool inverses = false;
  std::string dataset;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  // Search.
  std::string scorer;  // empty: featurized when a checkpoint is given, else uniform
  std::string checkpoint;
  std::string refiner;
  std::string anchors;
  std::string question;
  std::string gold;
  std::size_t beam = 10;
  std::size_t steps = 2;
  std::size_t k = 1;
  bool dump_candidates = false;

  // EPFO.
  std::string query;
  std::string queries_file;

  // Training.
  std::size_t epochs = 10;
  double lr = 0.1;
  double p_drop = 0.5;
  std::size_t max_len = 2;
  std::size_t dim = 64;
  std::size_t rounds = 2;
  std::string save_to;

  // Synthetic data and benchmarks.
  std::string task = "templated";
  std::size_t entities = 1000;
  std::size_t relations = 10;
  std::size_t questions = 100;
  std::size_t hops = 2;
  std::vector<std::size_t> entity_sizes{100, 1000, 10000, 100000};
  std::vector<std::size_t> relation_sizes{1, 10, 100};
  std::size_t fixed_relations = 10;
  std::size_t fixed_entities = 5000;
  std::size_t warmup = 50;
  std::size_t iters = 2000;
  bool emit_plots = false;

  // Verification.
  bool quick = false;
  bool inject_fault = false;
};

std::string default_out_dir() {
  const char* env = std::getenv("KGSEEK_OUT");
  return env != nullptr && *env != '\0' ? env : ".";
}

fs::path out_path(const Options& o, const std::string& name) {
  fs::create_directories(o.out_dir);
  return fs::path(o.out_dir) / name;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path.string());
  return out;
}

KnowledgeGraph load_graph(const Options& o) {
  if (o.graph.empty()) throw PreconditionError("--graph is required");
  if (!fs::exists(o.graph)) throw ParseError("graph file not found: " + o.graph);
  return load_triples(o.graph, o.inverses);
}

std::vector<QAExample> load_dataset(const Options& o, const KnowledgeGraph& g) {
  if (o.dataset.empty()) throw PreconditionError("--dataset is required");
  if (!fs::exists(o.dataset)) throw ParseError("dataset file not found: " + o.dataset);
  std::vector<QAExample> data = load_qa(o.dataset, g);
  if (data.empty()) throw PreconditionError("dataset " + o.dataset + " has 0 examples");
  return data;
}

SeekParams seek_params(const Options& o) {
  SeekParams p;
  p.beam_width = o.beam;
  p.max_steps = o.steps;
  p.top_k = o.k;
  if (p.top_k < 1 || p.top_k > p.beam_width || p.max_steps < 1) {
    throw PreconditionError("need 1 <= k <= beam and steps >= 1");
  }
  return p;
}

std::vector<RelationSeq> parse_gold(const std::string& text, const KnowledgeGraph& g) {
  std::vector<RelationSeq> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '|')) {
    if (part.find_first_not_of(' ') != std::string::npos) out.push_back(parse_relation_seq(part, g));
  }
  return out;
}

// Gold sequences for the oracle scorer: the dataset's, else weak labels.
std::vector<RelationSeq> gold_for(const KnowledgeGraph& g, const QAExample& ex,
                                  std::size_t max_len) {
  return ex.gold_sequences.empty() ? weak_labels(g, ex, max_len) : ex.gold_sequences;
}

// Per-example scorers for dataset-driven commands.
class DatasetScorers {
 public:
  DatasetScorers(const Options& o, const KnowledgeGraph& g, std::span<const QAExample> data) {
    if (o.scorer == "oracle") {
      for (const QAExample& ex : data) oracles_.emplace_back(gold_for(g, ex, o.max_len));
    } else if (o.scorer == "featurized") {
      if (o.checkpoint.empty()) throw PreconditionError("--checkpoint is required for featurized");
      model_ = std::make_unique<FeaturizedModel>(FeaturizedModel::load_file(o.checkpoint));
      model_->check_compatible(g);
    } else if (o.scorer != "uniform") {
      throw PreconditionError("unknown scorer '" + o.scorer + "'");
    }
  }

  const EdgeScorer& operator()(std::size_t i) const {
    if (!oracles_.empty()) return oracles_[i];
    if (model_) return *model_;
    return uniform_;
  }

 private:
  std::vector<OracleScorer> oracles_;
  std::unique_ptr<FeaturizedModel> model_;
  UniformScorer uniform_;
};

// ---------------------------------------------------------------------------

int cmd_load(const Options& o) {
  const KnowledgeGraph g = load_graph(o);
  std::cout << g.stats_line() << '\n';
  if (!o.save_to.empty()) {
    std::ofstream out = open_out(o.save_to);
    write_triples(g, out);
  }
  return kOk;
}

int cmd_seek(const Options& o) {
  const KnowledgeGraph g = load_graph(o);
  std::vector<EntityId> ids;
  std::stringstream ss(o.anchors);
  std::string name;
  while (std::getline(ss, name, '|')) {
    if (!name.empty()) ids.push_back(g.entity_id(name));
  }
  if (ids.empty()) throw PreconditionError("--anchors names no entity");
  const EntitySet anchors(std::move(ids));
  const std::vector<std::string> question = tokenize(o.question);

  std::unique_ptr<EdgeScorer> scorer;
  if (o.scorer == "uniform") {
    scorer = std::make_unique<UniformScorer>();
  } else if (o.scorer == "oracle") {
    if (o.gold.empty()) throw PreconditionError("--gold is required for the oracle scorer");
    scorer = std::make_unique<OracleScorer>(parse_gold(o.gold, g));
  } else if (o.scorer == "featurized") {
    if (o.checkpoint.empty()) throw PreconditionError("--checkpoint is required for featurized");
    auto model = std::make_unique<FeaturizedModel>(FeaturizedModel::load_file(o.checkpoint));
    model->check_compatible(g);
    scorer = std::move(model);
  } else {
    throw PreconditionError("unknown scorer '" + o.scorer + "'");
  }

  const SeekParams params = seek_params(o);
  const SeekResult r = seek(g, anchors, question, *scorer, params);
  write_seek_rows(std::cout, g, r);
  std::cout << "candidates=" << r.candidates.size() << " scorer_calls=" << r.scorer_calls
            << " bound=" << scorer_call_bound(g, params) << '\n';
  if (r.entries.size() < params.top_k) {
    std::cerr << "warning: requested k=" << params.top_k << " but only " << r.entries.size()
              << " sequence(s) found\n";
  }
  if (o.dump_candidates) {
    r.candidates.for_each([&](EntityId v) { std::cout << g.entity_name(v) << '\n'; });
  }
  return kOk;
}

std::vector<std::string> read_query_lines(const Options& o) {
  std::vector<std::string> lines;
  if (!o.query.empty()) lines.push_back(o.query);
  if (!o.queries_file.empty()) {
    std::ifstream in(o.queries_file);
    if (!in) throw ParseError("cannot open queries file " + o.queries_file);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos && line[0] != '#') {
        lines.push_back(line);
      }
    }
  }
  if (lines.empty()) throw PreconditionError("give --query or --queries");
  return lines;
}

DnfQuery checked_query(const std::string& line, const KnowledgeGraph& g, std::size_t index) {
  DnfQuery q = to_dnf(parse_query_line(line, g));
  const ValidityReport report = validate(g, q);
  if (!report) {
    throw PreconditionError("query " + std::to_string(index + 1) + " is invalid (conjunct " +
                            std::to_string(report.conjunct + 1) + "): " + report.reason);
  }
  return q;
}

int cmd_query(const Options& o) {
  const KnowledgeGraph g = load_graph(o);
  const auto lines = read_query_lines(o);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const EntitySet answers = evaluate(g, checked_query(lines[i], g, i));
    std::vector<std::string> names;
    answers.for_each([&](EntityId v) { names.push_back(g.entity_name(v)); });
    std::sort(names.begin(), names.end());
    for (std::size_t j = 0; j < names.size(); ++j) std::cout << (j ? "|" : "") << names[j];
    std::cout << '\n';
  }
  return kOk;
}

int cmd_cover(const Options& o) {
  const KnowledgeGraph g = load_graph(o);
  const auto lines = read_query_lines(o);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const DnfQuery q = checked_query(lines[i], g, i);
    const auto seqs = cover_sequences(g, q);
    std::cout << "query " << (i + 1) << ": n_or=" << q.n_or() << " sequences=" << seqs.size()
              << '\n';
    for (const RelationSeq& s : seqs) std::cout << s.to_string(g) << '\n';
  }
  return kOk;
}

int cmd_labels(const Options& o) {
  const KnowledgeGraph g = load_graph(o);
  const auto data = load_dataset(o, g);
  std::ofstream out = open_out(out_path(o, "labels.csv"));
  out << "# seed=" << o.seed << "\nexample,superset_size,sequences\n";
  std::size_t unanswerable = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto labels = weak_labels(g, data[i], o.max_len);
    if (labels.empty()) ++unanswerable;
    const std::size_t size =
        labels.empty() ? 0 : reach(g, data[i].anchors, labels.front()).size();
    out << i << ',' << size << ',';
    for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "|" : "") << labels[j].to_string(g);
    out << '\n';
  }
  std::cout << "examples=" << data.size() << " unanswerable=" << unanswerable
            << " max_len=" << o.max_len << '\n';
  return kOk;
}

int cmd_train(const Options& o) {
  const KnowledgeGraph g = load_graph(o);
  const auto data = load_dataset(o, g);
  FeaturizedConfig config;
  config.dim = o.dim;
  config.seed = o.seed;
  FeaturizedModel model = FeaturizedModel::for_graph(g, config);
  TrainParams params;
  params.epochs = o.epochs;
  params.learning_rate = o.lr;
  params.p_drop_init = o.p_drop;
  params.max_len = o.max_len;
  params.seed = o.seed;
  const TrainReport report = train(model, g, data, params);

  std::ofstream out = open_out(out_path(o, "train_loss.csv"));
  out << "# seed=" << o.seed << "\nepoch,loss,p_drop\n";
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    out << e << ',' << report.epoch_loss[e] << ','
        << path_dropout_probability(e, params.epochs, params.p_drop_init) << '\n';
  }
  const std::string ckpt = o.save_to.empty() ? out_path(o, "scorer.ckpt").string() : o.save_to;
  model.save_file(ckpt);
  std::cout << "examples_used=" << report.examples_used
            << " examples_skipped=" << report.examples_skipped << " steps=" << report.steps
            << " final_loss="
            << (report.epoch_loss.empty() ? 0.0 : report.epoch_loss.back()) << '\n'
            << "checkpoint=" << ckpt << '\n';
  return kOk;
}

std::vector<RefinerEpisode> build_episodes(const Options& o, const KnowledgeGraph& g,
                                           std::span<const QAExample> data) {
  const DatasetScorers scorers(o, g, data);
  const SeekParams params = seek_params(o);
  std::vector<RefinerEpisode> episodes;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const SeekResult r = seek(g, data[i].anchors, data[i].question, scorers(i), params);
    episodes.push_back(make_episode(g, data[i], r));
  }
  return episodes;
}

int cmd_train_refiner(const Options& o) {
  const KnowledgeGraph g = load_graph(o);
  const auto data = load_dataset(o, g);
  const auto episodes = build_episodes(o, g, data);
  RefinerConfig config;
  config.dim = o.dim;
  config.rounds = o.rounds;
  config.seed = o.seed;
  RefinerModel model(g.num_relations(), config);
  const RefinerTrainReport report = train_refiner(model, episodes, o.epochs, o.lr, o.seed);

  std::ofstream out = open_out(out_path(o, "refiner_loss.csv"));
  out << "# seed=" << o.seed << "\nepoch,loss\n";
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    out << e << ',' << report.epoch_loss[e] << '\n';
  }
  const std::string ckpt = o.save_to.empty() ? out_path(o, "refiner.ckpt").string() : o.save_to;
  model.save_file(ckpt);
  std::cout << "episodes_used=" << report.episodes_used
            << " episodes_skipped=" << report.episodes_skipped << '\n'
            << "checkpoint=" << ckpt << '\n';
  return kOk;
}

int cmd_eval(const Options& o) {
  const KnowledgeGraph g = load_graph(o);
  const auto data = load_dataset(o, g);
  const auto episodes = build_episodes(o, g, data);

  std::ofstream sizes = open_out(out_path(o, "eval_subgraphs.csv"));
  sizes << "# seed=" << o.seed << "\nexample,candidates,answers_in_candidates,subgraph_nodes,"
        << "subgraph_edges\n";
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const RefinerEpisode& ep = episodes[i];
    sizes << i << ',' << ep.candidates.size() << ',' << ep.answers.size() << ','
          << ep.sub.graph.num_entities() << ',' << ep.sub.graph.num_edges() << '\n';
  }

  std::ofstream out = open_out(out_path(o, "eval.csv"));
  out << "# seed=" << o.seed << "\nvariant,hits_at_1,examples\n";
  double unrefined = 0.0;
  for (const RefinerEpisode& ep : episodes) {
    if (!ep.candidates.empty()) {
      unrefined += static_cast<double>(ep.answers.size()) /
                   static_cast<double>(ep.candidates.size());
    }
  }
  unrefined /= static_cast<double>(episodes.size());
  out << "unrefined," << unrefined << ',' << episodes.size() << '\n';
  std::cout << "examples=" << episodes.size() << "\nhits@1 unrefined=" << unrefined << '\n';
  if (!o.refiner.empty()) {
    const RefinerModel model = RefinerModel::load_file(o.refiner);
    const RefinerEval eval = evaluate_refiner(model, episodes);
    out << "refined," << eval.refined << ',' << eval.episodes << '\n';
    std::cout << "hits@1 refined=" << eval.refined << '\n';
  } else {
    std::cout << "hits@1 refined=skipped (no --refiner checkpoint)\n";
  }
  return kOk;
}

int cmd_bench(const Options& o) {
  SweepConfig config;
  config.entity_sizes = o.entity_sizes;
  config.relation_sizes = o.relation_sizes;
  config.fixed_relations = o.fixed_relations;
  config.fixed_entities = o.fixed_entities;
  config.n_questions = o.questions;
  config.warmup = o.warmup;
  config.iters = o.iters;
  config.workers = o.workers;
  config.params = seek_params(o);
  config.seed = o.seed;

  const SweepReport report = run_sweeps(config);
  std::vector<ThroughputRow> all = report.entity_sweep;
  all.insert(all.end(), report.relation_sweep.begin(), report.relation_sweep.end());
  {
    std::ofstream out = open_out(out_path(o, "bench_throughput.csv"));
    write_throughput_csv(out, o.seed, all);
  }
  std::size_t violations = 0;
  for (const ThroughputRow& r : all) {
    violations += r.bound_violations;
    std::cout << r.mode << " |V|=" << r.n_entities << " |R|=" << r.n_relations
              << " qps=" << r.queries_per_second << " scorer_calls_mean=" << r.scorer_calls_mean
              << " bound=" << r.scorer_call_bound << '\n';
  }

  if (o.emit_plots) {
    {
      std::ofstream out = open_out(out_path(o, "fig5a.csv"));
      write_throughput_csv(out, o.seed, report.entity_sweep);
    }
    {
      std::ofstream out = open_out(out_path(o, "fig5b.csv"));
      write_throughput_csv(out, o.seed, report.relation_sweep);
    }
    {
      std::ofstream out = open_out(out_path(o, "fig5d.csv"));
      write_edge_sweep_csv(out, o.seed, report.edge_sweep);
    }
    {
      const SynthData data = gen_synthetic(
          {o.fixed_entities, o.fixed_relations, o.seed, o.hops, o.questions});
      const OracleScorers oracle(data.examples);
      const UniformScorer uniform;
      SeekParams params = seek_params(o);
      const std::size_t k_max = std::max<std::size_t>(params.beam_width, 1);
      std::ofstream out = open_out(out_path(o, "fig4.csv"));
      write_precision_recall_csv(
          out, o.seed, "oracle",
          precision_recall_at_k(data.graph, data.examples, oracle.as_function(), params, k_max));
      std::ostringstream rest;
      write_precision_recall_csv(
          rest, o.seed, "uniform",
          precision_recall_at_k(data.graph, data.examples,
                                [&](std::size_t) -> const EdgeScorer& { return uniform; }, params,
                                k_max));
      // Drop the second seed and header lines; one table per file.
      std::string line;
      std::istringstream in(rest.str());
      std::getline(in, line);
      std::getline(in, line);
      while (std::getline(in, line)) out << line << '\n';
    }
    {
      const KnowledgeGraph typed = gen_typed({4, 250, 3, 4, o.seed});
      const SynthData uniform_graph = gen_synthetic({o.fixed_entities, o.fixed_relations, o.seed, 2, 0});
      auto rows = compression_stats(typed, "typed", 20, 3, o.seed);
      auto more = compression_stats(uniform_graph.graph, "uniform", 20, 3, o.seed);
      rows.insert(rows.end(), more.begin(), more.end());
      std::ofstream out = open_out(out_path(o, "fig7.csv"));
      write_compression_csv(out, o.seed, rows);
    }
    {
      const SynthData data = gen_synthetic(
          {o.fixed_entities, o.fixed_relations, o.seed, o.hops, o.questions});
      std::ofstream out = open_out(out_path(o, "bench_preprocess.csv"));
      write_preprocess_csv(out, o.seed, bench_preprocessing(data.graph, data.examples));
    }
  }
  if (violations > 0) {
    std::cerr << "scorer-call bound violated on " << violations << " queries\n";
    return kProperty;
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  oracle::SuiteOptions base;
  base.seed = o.seed;
  base.inject_fault = o.inject_fault;
  auto with_cases = [&](std::size_t full, std::size_t quick) {
    oracle::SuiteOptions s = base;
    s.cases = o.quick ? quick : full;
    return s;
  };
  const std::vector<oracle::SuiteResult> results{
      oracle::coalesce_suite(with_cases(200, 20)),
      oracle::beam_suite(with_cases(200, 20)),
      oracle::prop1_suite(with_cases(1000, 100)),
      oracle::weak_label_suite(with_cases(100, 10)),
  };
  bool ok = true;
  for (const auto& r : results) {
    std::cout << r.summary() << '\n';
    for (const std::string& f : r.failures) std::cout << "  FAIL " << f << '\n';
    ok = ok && r.ok();
  }
  return ok ? kOk : kProperty;
}

int cmd_synth(const Options& o) {
  SynthData data;
  if (o.task == "templated") {
    data = gen_synthetic({o.entities, o.relations, o.seed, o.hops, o.questions});
  } else if (o.task == "intersection") {
    IntersectionSpec spec;
    spec.n_episodes = o.questions;
    spec.seed = o.seed;
    data = gen_intersection(spec);
  } else {
    throw PreconditionError("unknown task '" + o.task + "' (templated or intersection)");
  }
  {
    std::ofstream out = open_out(out_path(o, "graph.tsv"));
    write_triples(data.graph, out);
  }
  {
    std::ofstream out = open_out(out_path(o, "qa.tsv"));
    write_qa(out, data.graph, data.examples);
  }
  std::cout << data.graph.stats_line() << " questions=" << data.examples.size() << '\n';
  if (data.graph.has_inverses()) std::cout << "note: load graph.tsv with --inverses\n";
  return kOk;
}

// ---------------------------------------------------------------------------

void add_graph_options(CLI::App* cmd, Options& o) {
  cmd->add_option("-g,--graph", o.graph, "Triple file (subject<TAB>relation<TAB>object)");
  cmd->add_flag("--inverses", o.inverses, "Add r^-1 edges for every relation");
}

void add_search_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--scorer", o.scorer,
                  "uniform, oracle or featurized (default: featurized with --checkpoint, else "
                  "uniform)")
      ->check(CLI::IsMember({"uniform", "oracle", "featurized"}));
  cmd->add_option("--checkpoint", o.checkpoint, "Featurized scorer checkpoint");
  cmd->add_option("--beam", o.beam, "Beam width");
  cmd->add_option("--steps", o.steps, "Maximum decoding steps");
  cmd->add_option("-k", o.k, "Number of relation sequences to keep");
  cmd->add_option("--max-len", o.max_len, "Weak-label horizon in hops");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.out_dir = default_out_dir();

  CLI::App app{"Knowledge seeking over relation-coalesced graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with option values; flags win");
  app.add_option("--out", o.out_dir, "Output directory (default $KGSEEK_OUT or .)");
  app.add_option("--seed", o.seed, "Root seed");
  app.add_option("--workers", o.workers, "Worker threads where supported");
  std::string simd;
  app.add_option("--simd", simd, "Kernel variant: scalar or avx2 (default: best available)")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  auto* load = app.add_subcommand("load", "Load a triple file and print graph statistics");
  add_graph_options(load, o);
  load->add_option("--write", o.save_to, "Write the graph back as triples");

  auto* seek_cmd = app.add_subcommand("seek", "Beam-search relation sequences for a question");
  add_graph_options(seek_cmd, o);
  add_search_options(seek_cmd, o);
  seek_cmd->add_option("--anchors", o.anchors, "Anchor entity names, '|'-separated")->required();
  seek_cmd->add_option("-q,--question", o.question, "Question text");
  seek_cmd->add_option("--gold", o.gold, "Gold sequences for the oracle scorer, e.g. 'a b|c'");
  seek_cmd->add_flag("--dump-candidates", o.dump_candidates, "Print candidate entity names");

  auto* query = app.add_subcommand("query", "Evaluate EPFO queries by brute force");
  add_graph_options(query, o);
  query->add_option("--query", o.query, "One query line");
  query->add_option("--queries", o.queries_file, "File with one query per line");

  auto* cover = app.add_subcommand("cover", "Relation sequences covering an EPFO query");
  add_graph_options(cover, o);
  cover->add_option("--query", o.query, "One query line");
  cover->add_option("--queries", o.queries_file, "File with one query per line");

  auto* labels = app.add_subcommand("labels", "Weak-supervision labels for a QA dataset");
  add_graph_options(labels, o);
  labels->add_option("-d,--dataset", o.dataset, "QA file");
  labels->add_option("--max-len", o.max_len, "Horizon in hops");

  auto* train_cmd = app.add_subcommand("train", "Train the featurized scorer");
  add_graph_options(train_cmd, o);
  train_cmd->add_option("-d,--dataset", o.dataset, "QA file");
  train_cmd->add_option("--epochs", o.epochs, "Epochs");
  train_cmd->add_option("--lr", o.lr, "SGD learning rate");
  train_cmd->add_option("--p-drop", o.p_drop, "Initial path-dropout probability");
  train_cmd->add_option("--max-len", o.max_len, "Weak-label horizon in hops");
  train_cmd->add_option("--dim", o.dim, "Embedding dimension");
  train_cmd->add_option("--save", o.save_to, "Checkpoint path (default <out>/scorer.ckpt)");

  auto* train_ref = app.add_subcommand("train-refiner", "Train the candidate refiner");
  add_graph_options(train_ref, o);
  add_search_options(train_ref, o);
  train_ref->add_option("-d,--dataset", o.dataset, "QA file");
  train_ref->add_option("--epochs", o.epochs, "Epochs");
  train_ref->add_option("--lr", o.lr, "SGD learning rate");
  train_ref->add_option("--dim", o.dim, "State dimension")->default_str("16");
  train_ref->add_option("--rounds", o.rounds, "Message-passing rounds");
  train_ref->add_option("--save", o.save_to, "Checkpoint path (default <out>/refiner.ckpt)");

  auto* eval = app.add_subcommand("eval", "Hits@1 of unrefined and refined candidates");
  add_graph_options(eval, o);
  add_search_options(eval, o);
  eval->add_option("-d,--dataset", o.dataset, "QA file");
  eval->add_option("--refiner", o.refiner, "Refiner checkpoint");

  auto* bench = app.add_subcommand("bench", "Throughput and coverage benchmarks on synthetic KBs");
  bench->add_option("--entity-sizes", o.entity_sizes, "|V| values for the entity sweep");
  bench->add_option("--relation-sizes", o.relation_sizes, "|R| values for the relation sweep");
  bench->add_option("--fixed-relations", o.fixed_relations, "|R| during the entity sweep");
  bench->add_option("--fixed-entities", o.fixed_entities, "|V| during the relation sweep");
  bench->add_option("--questions", o.questions, "Questions per graph");
  bench->add_option("--hops", o.hops, "Answer distance");
  bench->add_option("--warmup", o.warmup, "Untimed queries per configuration");
  bench->add_option("--iters", o.iters, "Timed queries per configuration");
  bench->add_option("--beam", o.beam, "Beam width");
  bench->add_option("--steps", o.steps, "Maximum decoding steps");
  bench->add_option("-k", o.k, "Sequences kept");
  bench->add_flag("--emit-plots-data", o.emit_plots, "Write fig4/5a/5b/5d/7 data files");

  auto* verify = app.add_subcommand("verify", "Run the oracle-equivalence property suites");
  verify->add_flag("--quick", o.quick, "Reduced case counts");
  verify->add_flag("--inject-fault", o.inject_fault, "Corrupt one result (self-test)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic graph and QA dataset");
  synth->add_option("--task", o.task, "templated or intersection");
  synth->add_option("--entities", o.entities, "|V|");
  synth->add_option("--relations", o.relations, "|R|");
  synth->add_option("--questions", o.questions, "Number of questions (episodes)");
  synth->add_option("--hops", o.hops, "Answer distance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }
  if (train_ref->parsed() && train_ref->count("--dim") == 0) o.dim = 16;
  if (o.scorer.empty()) o.scorer = o.checkpoint.empty() ? "uniform" : "featurized";
  if (!simd.empty() &&
      !kernels::set_isa(simd == "avx2" ? kernels::Isa::kAvx2 : kernels::Isa::kScalar)) {
    std::cerr << "error: kernel variant '" << simd << "' is not available on this machine\n";
    return kBadInput;
  }

  try {
    if (load->parsed()) return cmd_load(o);
    if (seek_cmd->parsed()) return cmd_seek(o);
    if (query->parsed()) return cmd_query(o);
    if (cover->parsed()) return cmd_cover(o);
    if (labels->parsed()) return cmd_labels(o);
    if (train_cmd->parsed()) return cmd_train(o);
    if (train_ref->parsed()) return cmd_train_refiner(o);
    if (eval->parsed()) return cmd_eval(o);
    if (bench->parsed()) return cmd_bench(o);
    if (verify->parsed()) return cmd_verify(o);
    if (synth->parsed()) return cmd_synth(o);
  } catch (const ScorerContractError& e) {
    std::cerr << "error: scorer contract violation: " << e.what() << '\n';
    return kContract;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kTraining;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const LookupError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
