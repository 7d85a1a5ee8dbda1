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

#include "kgseek/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "kgseek/coalesce.h"
#include "kgseek/errors.h"

namespace kgseek {

std::vector<RelationSeq> weak_labels(const KnowledgeGraph& g, const QAExample& ex,
                                     std::size_t max_len) {
  std::vector<RelationSeq> out;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (ReachableSet& rs : enumerate_reachable_sets(g, ex.anchors, max_len)) {
    const std::size_t size = rs.members.size();
    if (size > best || !ex.answers.is_subset_of(rs.members)) continue;
    if (size < best) {
      best = size;
      out.clear();
    }
    out.push_back(std::move(rs.seq));
  }
  return out;
}

double path_dropout_probability(std::size_t epoch, std::size_t epochs, double p_init) {
  const double half = static_cast<double>(epochs) / 2.0;
  if (half <= 0.0 || static_cast<double>(epoch) >= half) return 0.0;
  return p_init * (1.0 - static_cast<double>(epoch) / half);
}

std::vector<TrainingStep> training_steps(const KnowledgeGraph& g,
                                         std::span<const QAExample> data, std::size_t max_len,
                                         std::size_t* skipped) {
  std::vector<TrainingStep> steps;
  std::size_t n_skipped = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const QAExample& ex = data[i];
    std::vector<RelationSeq> gold =
        ex.gold_sequences.empty() ? weak_labels(g, ex, max_len) : ex.gold_sequences;
    // A zero-hop sequence has no decision to teach: the first step cannot stop.
    std::erase_if(gold, [](const RelationSeq& s) { return s.hops() == 0; });
    if (gold.empty() || ex.anchors.empty()) {
      ++n_skipped;
      continue;
    }
    // Terminated copies so the final step's gold is self.
    std::vector<RelationSeq> full;
    for (const RelationSeq& s : gold) {
      full.push_back(s.is_terminated() ? s : s.extended(kSelfRelation));
    }
    const double weight = 1.0 / static_cast<double>(full.size());
    for (const RelationSeq& s : full) {
      EntitySet frontier = ex.anchors;
      std::vector<RelationId> prefix_rels{kSelfRelation};
      for (std::size_t t = 1; t < s.size(); ++t) {
        TrainingStep step;
        step.example = i;
        step.prefix = RelationSeq(prefix_rels);
        step.options = g.outgoing_relations(frontier);
        if (t > 1) step.options.insert(step.options.begin(), kSelfRelation);
        step.gold = s[t];
        for (const RelationSeq& other : full) {
          if (other.size() > t &&
              std::equal(prefix_rels.begin(), prefix_rels.end(), other.relations().begin())) {
            step.protected_options.push_back(other[t]);
          }
        }
        std::sort(step.protected_options.begin(), step.protected_options.end());
        step.protected_options.erase(
            std::unique(step.protected_options.begin(), step.protected_options.end()),
            step.protected_options.end());
        step.weight = weight;
        if (std::find(step.options.begin(), step.options.end(), step.gold) ==
            step.options.end()) {
          throw PreconditionError("training_steps: gold relation is not a valid option");
        }
        if (s[t] != kSelfRelation) frontier = reach_step(g, frontier, s[t]);
        prefix_rels.push_back(s[t]);
        steps.push_back(std::move(step));
      }
    }
  }
  if (skipped != nullptr) *skipped = n_skipped;
  return steps;
}

TrainReport train(FeaturizedModel& model, const KnowledgeGraph& g,
                  std::span<const QAExample> data, const TrainParams& params) {
  model.check_compatible(g);
  TrainReport report;
  const std::vector<TrainingStep> steps =
      training_steps(g, data, params.max_len, &report.examples_skipped);
  report.examples_used = data.size() - report.examples_skipped;
  report.steps = steps.size();
  if (params.epochs > 0 && steps.empty()) {
    throw PreconditionError("train: no example has a gold sequence within the horizon");
  }

  std::mt19937_64 order_rng(params.seed);
  std::mt19937_64 drop_rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> order(steps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<RelationId> options;

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    const double p_drop = path_dropout_probability(epoch, params.epochs, params.p_drop_init);
    double total = 0.0;
    double total_weight = 0.0;
    for (std::size_t idx : order) {
      const TrainingStep& step = steps[idx];
      options.clear();
      for (RelationId r : step.options) {
        const bool keep = p_drop <= 0.0 ||
                          std::binary_search(step.protected_options.begin(),
                                             step.protected_options.end(), r) ||
                          unit(drop_rng) >= p_drop;
        if (keep) options.push_back(r);
      }
      const std::vector<std::string>& question = data[step.example].question;
      FeaturizedGradient grad;
      const double loss =
          model.loss_and_gradient({question, step.prefix, options}, step.gold, grad);
      if (!std::isfinite(loss)) {
        throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch) +
                            " on example " + std::to_string(step.example));
      }
      model.apply(grad, params.learning_rate * step.weight);
      total += step.weight * loss;
      total_weight += step.weight;
    }
    const double mean = total_weight > 0.0 ? total / total_weight : 0.0;
    if (!std::isfinite(mean) || !model.all_finite()) {
      throw TrainingError("train: parameters diverged at epoch " + std::to_string(epoch) +
                          " (learning rate " + std::to_string(params.learning_rate) + ")");
    }
    report.epoch_loss.push_back(mean);
  }
  return report;
}

double hits_at_1_unrefined(const KnowledgeGraph& g, std::span<const QAExample> data,
                           const EdgeScorer& scorer, const SeekParams& params) {
  if (data.empty()) throw PreconditionError("hits@1: 0 examples");
  double total = 0.0;
  for (const QAExample& ex : data) {
    const SeekResult r = seek(g, ex.anchors, ex.question, scorer, params);
    if (r.entries.empty() || r.entries.front().frontier.empty()) continue;
    const EntitySet& top = r.entries.front().frontier;
    total += static_cast<double>(top.intersection_size(ex.answers)) /
             static_cast<double>(top.size());
  }
  return total / static_cast<double>(data.size());
}

}  // namespace kgseek
