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

#include "kgseek/scorer.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kgseek/errors.h"

namespace kgseek {

void check_distribution(std::span<const double> probs, std::size_t n_options) {
  if (probs.size() != n_options) {
    throw ScorerContractError("scorer returned " + std::to_string(probs.size()) +
                              " probabilities for " + std::to_string(n_options) + " options");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      std::ostringstream msg;
      msg << "scorer returned invalid probability " << p;
      throw ScorerContractError(msg.str());
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "scorer probabilities sum to " << total;
    throw ScorerContractError(msg.str());
  }
}

std::vector<double> UniformScorer::score(const ScoreRequest& req) const {
  if (req.options.empty()) throw ScorerContractError("score: empty option set");
  return std::vector<double>(req.options.size(), 1.0 / static_cast<double>(req.options.size()));
}

OracleScorer::OracleScorer(std::vector<RelationSeq> gold) : gold_(std::move(gold)) {}

std::vector<RelationId> OracleScorer::gold_continuations(const RelationSeq& prefix) const {
  std::vector<RelationId> next;
  const auto p = prefix.relations();
  for (const RelationSeq& g : gold_) {
    const auto rels = g.relations();
    if (rels.size() < p.size() || !std::equal(p.begin(), p.end(), rels.begin())) continue;
    next.push_back(rels.size() == p.size() ? kSelfRelation : rels[p.size()]);
  }
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  return next;
}

std::vector<double> OracleScorer::score(const ScoreRequest& req) const {
  if (req.options.empty()) throw ScorerContractError("score: empty option set");
  const std::vector<RelationId> gold = gold_continuations(req.prefix);
  std::vector<char> is_gold(req.options.size(), 0);
  std::size_t n_gold = 0;
  for (std::size_t i = 0; i < req.options.size(); ++i) {
    if (std::binary_search(gold.begin(), gold.end(), req.options[i])) {
      is_gold[i] = 1;
      ++n_gold;
    }
  }
  const std::size_t n = req.options.size();
  if (n_gold == 0 || n_gold == n) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  const double on = (1.0 - kEpsilon) / static_cast<double>(n_gold);
  const double off = kEpsilon / static_cast<double>(n - n_gold);
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) probs[i] = is_gold[i] ? on : off;
  return probs;
}

}  // namespace kgseek
