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

// Weak supervision from question/answer pairs and SGD training of the
// featurized scorer with teacher forcing and path dropout.

#include <cstdint>
#include <span>
#include <vector>

#include "kgseek/featurized.h"
#include "kgseek/kg_store.h"
#include "kgseek/qa_dataset.h"
#include "kgseek/relation_seq.h"
#include "kgseek/seeker.h"

namespace kgseek {

// Every sequence of at most `max_len` hops whose reach is a superset of the
// answers of minimum cardinality. Empty when no reachable set covers them.
std::vector<RelationSeq> weak_labels(const KnowledgeGraph& g, const QAExample& ex,
                                     std::size_t max_len);

struct TrainParams {
  std::size_t epochs = 10;
  double learning_rate = 0.1;
  double p_drop_init = 0.5;
  // Horizon for weak labels when an example carries no gold sequences.
  std::size_t max_len = 2;
  std::uint64_t seed = 1;
};

// Linear decay from p_init at epoch 0 to 0 at epoch epochs/2, then 0.
double path_dropout_probability(std::size_t epoch, std::size_t epochs, double p_init);

// One teacher-forced decoding step.
struct TrainingStep {
  std::size_t example = 0;
  RelationSeq prefix;
  std::vector<RelationId> options;  // full option set, self first when present
  RelationId gold = 0;
  // Relations continuing any gold sequence with this prefix; never dropped.
  std::vector<RelationId> protected_options;
  double weight = 1.0;  // 1 / number of gold sequences of the example
};

struct TrainReport {
  std::vector<double> epoch_loss;  // weighted mean loss per epoch
  std::size_t examples_used = 0;
  std::size_t examples_skipped = 0;  // no gold sequence within the horizon
  std::size_t steps = 0;
};

// Expands each example's gold (or weak) sequences into teacher-forced steps:
// one per hop plus a terminating self step. Examples without usable
// sequences are counted as skipped.
std::vector<TrainingStep> training_steps(const KnowledgeGraph& g,
                                         std::span<const QAExample> data,
                                         std::size_t max_len, std::size_t* skipped = nullptr);

// Throws TrainingError when an epoch's loss or the parameters become
// non-finite, and PreconditionError when no example is usable.
TrainReport train(FeaturizedModel& model, const KnowledgeGraph& g,
                  std::span<const QAExample> data, const TrainParams& params);

// Mean over examples of |top-1 candidates ∩ answers| / |top-1 candidates|,
// the expected Hits@1 of a uniform pick among the top sequence's reach
// (0 when the search returns nothing).
double hits_at_1_unrefined(const KnowledgeGraph& g, std::span<const QAExample> data,
                           const EdgeScorer& scorer, const SeekParams& params);

}  // namespace kgseek
