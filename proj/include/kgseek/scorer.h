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

// The edge-likelihood contract used by knowledge seeking: given a question,
// the relation prefix decoded so far and the valid next relations, return a
// probability for each option.

#include <span>
#include <string>
#include <vector>

#include "kgseek/entity_set.h"
#include "kgseek/relation_seq.h"

namespace kgseek {

// Allowed deviation of an option distribution's total from 1.
inline constexpr double kDistributionTolerance = 1e-6;

struct ScoreRequest {
  std::span<const std::string> question;
  const RelationSeq& prefix;
  // Outgoing relations of the current frontier, plus self when terminating is
  // allowed. Never empty.
  std::span<const RelationId> options;
};

class EdgeScorer {
 public:
  virtual ~EdgeScorer() = default;

  // One probability per option, in option order. Must be read-only: seeks on
  // different threads may share a scorer.
  virtual std::vector<double> score(const ScoreRequest& req) const = 0;
};

// Throws ScorerContractError unless `probs` is a distribution over `n_options`
// entries (non-negative, finite, summing to 1 within kDistributionTolerance).
void check_distribution(std::span<const double> probs, std::size_t n_options);

class UniformScorer final : public EdgeScorer {
 public:
  std::vector<double> score(const ScoreRequest& req) const override;
};

// Puts 1 - epsilon on the options that continue one of the gold sequences
// (split evenly among them) and spreads epsilon over the rest. Off the gold
// paths it is uniform.
class OracleScorer final : public EdgeScorer {
 public:
  static constexpr double kEpsilon = 1e-3;

  explicit OracleScorer(std::vector<RelationSeq> gold);

  std::vector<double> score(const ScoreRequest& req) const override;

  // Next relations that keep `prefix` on a gold sequence (self when the
  // prefix is a complete gold sequence).
  std::vector<RelationId> gold_continuations(const RelationSeq& prefix) const;

 private:
  std::vector<RelationSeq> gold_;
};

}  // namespace kgseek
