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

// Candidate refinement on the subgraph around a seek result. Node states
// start from an anchor indicator plus a hashed question vector q, then run T
// rounds of relation-gated message passing along edge direction:
//
//   gate_r   = sigmoid(G[r] . q + c[r])
//   h'_v     = tanh(A h_v + B sum_{(u,r,v)} gate_r h_u + bias)
//   score_v  = w_out . h_v + b_out
//
// Only candidate nodes are ever ranked.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kgseek/entity_set.h"
#include "kgseek/kg_store.h"
#include "kgseek/qa_dataset.h"
#include "kgseek/seeker.h"

namespace kgseek {

struct RefinerConfig {
  std::size_t dim = 16;
  std::size_t hash_bits = 12;
  std::size_t rounds = 2;
  std::uint64_t seed = 1;
  double init_scale = 0.3;
};

struct RefinerGradient;

class RefinerModel {
 public:
  RefinerModel(std::size_t num_relations, const RefinerConfig& config);

  std::size_t dim() const { return dim_; }
  std::size_t rounds() const { return rounds_; }
  std::size_t num_relations() const { return num_relations_; }

  // Final score of every node of `sub` (indexed by local id).
  std::vector<double> node_scores(const KnowledgeGraph& sub, std::span<const std::string> question,
                                  const EntitySet& anchors) const;

  // Mean binary cross-entropy over candidates; fills `grad` when non-null.
  double loss(const KnowledgeGraph& sub, std::span<const std::string> question,
              const EntitySet& anchors, const EntitySet& candidates, const EntitySet& answers,
              RefinerGradient* grad) const;
  void apply(const RefinerGradient& grad, double lr);

  enum class Block { kQuestion, kAnchor, kSelf, kMessage, kBias, kGate, kGateBias, kOut, kOutBias };
  std::span<double> parameters(Block b);
  std::span<const double> parameters(Block b) const;
  std::vector<std::uint32_t> question_features(std::span<const std::string> question) const;
  bool all_finite() const;

  // Binary checkpoint: magic, dimensions, parameters.
  void save(std::ostream& out) const;
  static RefinerModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static RefinerModel load_file(const std::string& path);

  friend bool operator==(const RefinerModel&, const RefinerModel&) = default;

 private:
  struct Trace;
  Trace run(const KnowledgeGraph& sub, std::span<const std::string> question,
            const EntitySet& anchors) const;

  std::size_t num_relations_;
  std::size_t dim_;
  std::size_t hash_bits_;
  std::size_t rounds_;
  std::vector<double> question_;  // 2^hash_bits x d
  std::vector<double> anchor_;    // d
  std::vector<double> self_;      // A, d x d
  std::vector<double> message_;   // B, d x d
  std::vector<double> bias_;      // d
  std::vector<double> gate_;      // |R| x d
  std::vector<double> gate_bias_; // |R|
  std::vector<double> out_;       // d
  double out_bias_ = 0.0;
};

// Dense gradient with the same layout as the model's parameter blocks.
struct RefinerGradient {
  std::map<std::uint32_t, std::vector<double>> question;  // touched rows only
  std::vector<double> anchor, self, message, bias, gate, gate_bias, out;
  double out_bias = 0.0;
};

struct RankedCandidate {
  EntityId entity;  // local id in the subgraph
  double score;
};

// Candidates ranked by score descending (ties by ascending id). Throws
// PreconditionError when a candidate or anchor is not a node of `sub` or the
// candidate set is empty.
std::vector<RankedCandidate> refine(const RefinerModel& model, const KnowledgeGraph& sub,
                                    std::span<const std::string> question,
                                    const EntitySet& anchors, const EntitySet& candidates);

// One training instance, with every set in the subgraph's local ids.
struct RefinerEpisode {
  Subgraph sub;
  std::vector<std::string> question;
  EntitySet anchors;
  EntitySet candidates;
  EntitySet answers;
};

struct RefinerTrainReport {
  std::vector<double> epoch_loss;
  std::size_t episodes_used = 0;
  std::size_t episodes_skipped = 0;  // answers disjoint from candidates
};

RefinerTrainReport train_refiner(RefinerModel& model, std::span<const RefinerEpisode> episodes,
                                 std::size_t epochs, double lr, std::uint64_t seed);

// Max relative error (denominator max(|a|, |n|, 1e-5)) between analytic and
// central-difference gradients (step 1e-5) over every parameter the episode
// can influence.
double refiner_gradient_check(RefinerModel& model, const RefinerEpisode& episode);

// Builds an episode from a seek result: candidates are the result's candidate
// set and answers are intersected with it, all mapped into the candidate
// subgraph.
RefinerEpisode make_episode(const KnowledgeGraph& g, const QAExample& ex,
                            const SeekResult& result);

// Hits@1 of the refiner's top candidate, and the a/m expectation of a uniform
// pick over the same candidates, averaged over episodes.
struct RefinerEval {
  double refined = 0.0;
  double unrefined = 0.0;
  std::size_t episodes = 0;
};
RefinerEval evaluate_refiner(const RefinerModel& model, std::span<const RefinerEpisode> episodes);

// "entity_name,score" rows, best first.
void write_ranked(std::ostream& out, const Subgraph& sub, std::span<const RankedCandidate> ranked);

}  // namespace kgseek
