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

// A trainable relation-level scorer. The question is encoded as a pooled sum
// of hashed token features conjoined with the decoding step; the decoded
// prefix is folded through a tanh recurrence over relation embeddings. The
// logit of option r is
//
//   E[r] . (h_q + s_prefix) + b[r] + w_ov * overlap(r, question)
//
// where overlap is the fraction of the relation's surface-name tokens that
// occur in the question. Probabilities are a softmax over the options only.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kgseek/kg_store.h"
#include "kgseek/scorer.h"

namespace kgseek {

struct FeaturizedConfig {
  std::size_t dim = 64;
  std::size_t hash_bits = 14;
  std::uint64_t seed = 1;
  double init_scale = 0.1;
};

// Sparse gradient of the cross-entropy loss for one scoring step.
struct FeaturizedGradient {
  std::map<RelationId, std::vector<double>> relation;  // rows of E
  std::map<std::uint32_t, std::vector<double>> question;  // rows of Q
  std::vector<double> recurrence;                      // W_p, row-major, dense
  std::map<RelationId, double> bias;
  double overlap = 0.0;
};

class FeaturizedModel final : public EdgeScorer {
 public:
  // `relation_names` is the graph's relation table, self included.
  FeaturizedModel(std::vector<std::string> relation_names, const FeaturizedConfig& config);
  static FeaturizedModel for_graph(const KnowledgeGraph& g, const FeaturizedConfig& config);

  std::vector<double> score(const ScoreRequest& req) const override;

  // Cross-entropy of `gold` under the option distribution. `gold` must be one
  // of the options.
  double loss(const ScoreRequest& req, RelationId gold) const;
  double loss_and_gradient(const ScoreRequest& req, RelationId gold,
                           FeaturizedGradient& grad) const;
  // params -= lr * grad
  void apply(const FeaturizedGradient& grad, double lr);

  std::size_t dim() const { return dim_; }
  std::size_t num_relations() const { return relation_names_.size(); }
  std::size_t num_buckets() const { return std::size_t{1} << hash_bits_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const std::string> relation_names() const { return relation_names_; }

  // Hashed question feature buckets for decoding step `step` (1-based).
  std::vector<std::uint32_t> question_features(std::span<const std::string> question,
                                               std::size_t step) const;
  double overlap(RelationId r, std::span<const std::string> question) const;

  // Raw parameter blocks, for finite-difference checks and tests.
  enum class Block { kRelation, kQuestion, kRecurrence, kBias, kOverlap };
  std::span<double> parameters(Block b);
  std::span<const double> parameters(Block b) const;

  void set_zero();
  bool all_finite() const;
  // Throws PreconditionError when the relation table differs from `g`'s.
  void check_compatible(const KnowledgeGraph& g) const;

  // Binary checkpoint: magic, dimensions, seed, relation names, parameters.
  void save(std::ostream& out) const;
  static FeaturizedModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static FeaturizedModel load_file(const std::string& path);

  // Same configuration and bitwise-equal parameters.
  friend bool operator==(const FeaturizedModel& a, const FeaturizedModel& b);

 private:
  struct Forward;
  Forward forward(const ScoreRequest& req) const;

  std::vector<std::string> relation_names_;
  std::vector<std::vector<std::string>> relation_tokens_;
  std::size_t dim_;
  std::size_t hash_bits_;
  std::uint64_t seed_;
  std::vector<double> relation_;    // (|R|+1) x d
  std::vector<double> question_;    // 2^hash_bits x d
  std::vector<double> recurrence_;  // d x d
  std::vector<double> bias_;        // |R|+1
  double overlap_weight_ = 0.0;
};

// Largest relative difference between the analytic gradient and central
// finite differences (step 1e-5) over every parameter the request touches.
// Relative error is |a - n| / max(|a|, |n|, 1e-5).
double gradient_check(FeaturizedModel& model, const ScoreRequest& req, RelationId gold);

}  // namespace kgseek
