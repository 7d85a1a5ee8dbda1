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

#include "kgseek/featurized.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "kgseek/errors.h"
#include "kgseek/kernels.h"
#include "kgseek/qa_dataset.h"

namespace kgseek {
namespace {

constexpr char kMagic[8] = {'K', 'G', 'S', 'K', 'F', 'M', '0', '1'};
constexpr std::size_t kMaxPosition = 15;
constexpr std::size_t kMaxStep = 7;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint32_t feature_bucket(std::string_view token, std::uint8_t kind, std::size_t position,
                             std::size_t step, std::size_t hash_bits) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, token.data(), token.size());
  const std::uint8_t tail[3] = {kind, static_cast<std::uint8_t>(position),
                                static_cast<std::uint8_t>(step)};
  h = fnv1a(h, tail, sizeof tail);
  // FNV's high bits barely depend on the last bytes; finalize before slicing.
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return static_cast<std::uint32_t>(h >> (64 - hash_bits));
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ParseError("checkpoint: truncated file");
  return v;
}

void write_array(std::ostream& out, const std::vector<double>& a) {
  out.write(reinterpret_cast<const char*>(a.data()),
            static_cast<std::streamsize>(a.size() * sizeof(double)));
}

void read_array(std::istream& in, std::vector<double>& a) {
  in.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(double)));
  if (!in) throw ParseError("checkpoint: truncated parameter block");
}

}  // namespace

struct FeaturizedModel::Forward {
  std::vector<std::uint32_t> features;
  double feature_scale = 0.0;
  std::vector<double> hq;
  std::vector<std::vector<double>> states;  // s_0 .. s_L
  std::vector<double> x;
  std::vector<double> overlaps;
  std::vector<double> probs;
};

FeaturizedModel::FeaturizedModel(std::vector<std::string> relation_names,
                                 const FeaturizedConfig& config)
    : relation_names_(std::move(relation_names)),
      dim_(config.dim),
      hash_bits_(config.hash_bits),
      seed_(config.seed) {
  if (dim_ == 0) throw PreconditionError("featurized model: dim must be positive");
  if (hash_bits_ < 1 || hash_bits_ > 24) {
    throw PreconditionError("featurized model: hash_bits must be in [1, 24]");
  }
  if (relation_names_.empty() || relation_names_[0] != kSelfRelationName) {
    throw PreconditionError("featurized model: relation table must start with self");
  }
  for (const std::string& name : relation_names_) {
    std::string_view base = name;
    if (base.ends_with(kInverseSuffix)) base.remove_suffix(kInverseSuffix.size());
    relation_tokens_.push_back(name == kSelfRelationName ? std::vector<std::string>{}
                                                         : tokenize(base));
  }
  const std::size_t n_rel = relation_names_.size();
  relation_.assign(n_rel * dim_, 0.0);
  question_.assign(num_buckets() * dim_, 0.0);
  recurrence_.assign(dim_ * dim_, 0.0);
  bias_.assign(n_rel, 0.0);

  std::mt19937_64 rng(seed_);
  std::normal_distribution<double> normal(0.0, config.init_scale);
  for (double& w : relation_) w = normal(rng);
  const double rec_scale = 0.5 / std::sqrt(static_cast<double>(dim_));
  std::normal_distribution<double> rec(0.0, rec_scale);
  for (double& w : recurrence_) w = rec(rng);
  // Question rows start at zero; they only move for features that are seen.
  overlap_weight_ = 0.0;
}

FeaturizedModel FeaturizedModel::for_graph(const KnowledgeGraph& g,
                                           const FeaturizedConfig& config) {
  const auto names = g.relation_names();
  return FeaturizedModel(std::vector<std::string>(names.begin(), names.end()), config);
}

std::vector<std::uint32_t> FeaturizedModel::question_features(
    std::span<const std::string> question, std::size_t step) const {
  const std::size_t t = std::min(step, kMaxStep);
  std::vector<std::uint32_t> out;
  out.reserve(question.size() * 3 + 1);
  out.push_back(feature_bucket("", 0, 0, t, hash_bits_));
  const std::size_t n = question.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& tok = question[i];
    out.push_back(feature_bucket(tok, 1, 0, t, hash_bits_));
    out.push_back(feature_bucket(tok, 2, std::min(i, kMaxPosition), t, hash_bits_));
    out.push_back(feature_bucket(tok, 3, std::min(n - 1 - i, kMaxPosition), t, hash_bits_));
  }
  return out;
}

double FeaturizedModel::overlap(RelationId r, std::span<const std::string> question) const {
  const auto& toks = relation_tokens_[r];
  if (toks.empty()) return 0.0;
  std::size_t hits = 0;
  for (const std::string& t : toks) {
    if (std::find(question.begin(), question.end(), t) != question.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(toks.size());
}

FeaturizedModel::Forward FeaturizedModel::forward(const ScoreRequest& req) const {
  if (req.options.empty()) throw ScorerContractError("featurized scorer: empty option set");
  const std::size_t d = dim_;
  for (RelationId r : req.options) {
    if (r >= num_relations()) throw ScorerContractError("featurized scorer: option out of range");
  }
  for (RelationId r : req.prefix.relations()) {
    if (r >= num_relations()) throw ScorerContractError("featurized scorer: prefix out of range");
  }

  Forward f;
  f.features = question_features(req.question, req.prefix.size());
  f.feature_scale = 1.0 / std::sqrt(static_cast<double>(f.features.size()));
  f.hq.assign(d, 0.0);
  for (std::uint32_t b : f.features) {
    kernels::axpy(f.feature_scale, {&question_[b * d], d}, f.hq);
  }

  f.states.assign(1, std::vector<double>(d, 0.0));
  for (RelationId r : req.prefix.relations()) {
    const std::vector<double>& prev = f.states.back();
    std::vector<double> next(relation_.begin() + static_cast<std::ptrdiff_t>(r * d),
                             relation_.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
    for (std::size_t i = 0; i < d; ++i) {
      next[i] += kernels::dot({&recurrence_[i * d], d}, prev);
      next[i] = std::tanh(next[i]);
    }
    f.states.push_back(std::move(next));
  }

  f.x = f.hq;
  kernels::axpy(1.0, f.states.back(), f.x);

  const std::size_t m = req.options.size();
  std::vector<double> logits(m);
  f.overlaps.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const RelationId r = req.options[j];
    f.overlaps[j] = overlap(r, req.question);
    logits[j] = kernels::dot({&relation_[r * d], d}, f.x) + bias_[r] +
                overlap_weight_ * f.overlaps[j];
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  f.probs.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    f.probs[j] = std::exp(logits[j] - mx);
    total += f.probs[j];
  }
  for (double& p : f.probs) p /= total;
  return f;
}

std::vector<double> FeaturizedModel::score(const ScoreRequest& req) const {
  return forward(req).probs;
}

namespace {

std::size_t gold_index(std::span<const RelationId> options, RelationId gold) {
  auto it = std::find(options.begin(), options.end(), gold);
  if (it == options.end()) throw PreconditionError("featurized model: gold relation is not an option");
  return static_cast<std::size_t>(it - options.begin());
}

std::vector<double>& row(std::map<std::uint32_t, std::vector<double>>& m, std::uint32_t key,
                         std::size_t d) {
  auto [it, inserted] = m.try_emplace(key);
  if (inserted) it->second.assign(d, 0.0);
  return it->second;
}

}  // namespace

double FeaturizedModel::loss(const ScoreRequest& req, RelationId gold) const {
  const std::size_t g = gold_index(req.options, gold);
  return -std::log(forward(req).probs[g]);
}

double FeaturizedModel::loss_and_gradient(const ScoreRequest& req, RelationId gold,
                                          FeaturizedGradient& grad) const {
  const std::size_t gi = gold_index(req.options, gold);
  const Forward f = forward(req);
  const std::size_t d = dim_;
  if (grad.recurrence.size() != d * d) grad.recurrence.assign(d * d, 0.0);

  std::vector<double> dx(d, 0.0);
  for (std::size_t j = 0; j < req.options.size(); ++j) {
    const RelationId r = req.options[j];
    const double dl = f.probs[j] - (j == gi ? 1.0 : 0.0);
    grad.bias[r] += dl;
    grad.overlap += dl * f.overlaps[j];
    kernels::axpy(dl, f.x, row(grad.relation, r, d));
    kernels::axpy(dl, {&relation_[r * d], d}, dx);
  }
  for (std::uint32_t b : f.features) {
    kernels::axpy(f.feature_scale, dx, row(grad.question, b, d));
  }

  // Backpropagate through the prefix recurrence.
  std::vector<double> ds = dx;
  std::vector<double> da(d);
  const auto prefix = req.prefix.relations();
  for (std::size_t i = prefix.size(); i >= 1; --i) {
    const std::vector<double>& s = f.states[i];
    const std::vector<double>& prev = f.states[i - 1];
    for (std::size_t k = 0; k < d; ++k) da[k] = ds[k] * (1.0 - s[k] * s[k]);
    kernels::axpy(1.0, da, row(grad.relation, prefix[i - 1], d));
    std::fill(ds.begin(), ds.end(), 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      kernels::axpy(da[k], prev, {&grad.recurrence[k * d], d});
      kernels::axpy(da[k], {&recurrence_[k * d], d}, ds);
    }
  }
  return -std::log(f.probs[gi]);
}

void FeaturizedModel::apply(const FeaturizedGradient& grad, double lr) {
  const std::size_t d = dim_;
  for (const auto& [r, g] : grad.relation) kernels::axpy(-lr, g, {&relation_[r * d], d});
  for (const auto& [b, g] : grad.question) kernels::axpy(-lr, g, {&question_[b * d], d});
  if (!grad.recurrence.empty()) kernels::axpy(-lr, grad.recurrence, recurrence_);
  for (const auto& [r, g] : grad.bias) bias_[r] -= lr * g;
  overlap_weight_ -= lr * grad.overlap;
}

std::span<double> FeaturizedModel::parameters(Block b) {
  switch (b) {
    case Block::kRelation: return relation_;
    case Block::kQuestion: return question_;
    case Block::kRecurrence: return recurrence_;
    case Block::kBias: return bias_;
    case Block::kOverlap: return {&overlap_weight_, 1};
  }
  return {};
}

std::span<const double> FeaturizedModel::parameters(Block b) const {
  return const_cast<FeaturizedModel*>(this)->parameters(b);
}

void FeaturizedModel::set_zero() {
  for (Block b : {Block::kRelation, Block::kQuestion, Block::kRecurrence, Block::kBias,
                  Block::kOverlap}) {
    auto p = parameters(b);
    std::fill(p.begin(), p.end(), 0.0);
  }
}

bool FeaturizedModel::all_finite() const {
  for (Block b : {Block::kRelation, Block::kQuestion, Block::kRecurrence, Block::kBias,
                  Block::kOverlap}) {
    for (double w : parameters(b)) {
      if (!std::isfinite(w)) return false;
    }
  }
  return true;
}

void FeaturizedModel::check_compatible(const KnowledgeGraph& g) const {
  const auto names = g.relation_names();
  if (names.size() != relation_names_.size() ||
      !std::equal(names.begin(), names.end(), relation_names_.begin())) {
    throw PreconditionError("featurized model: relation table does not match the graph (" +
                            std::to_string(relation_names_.size()) + " vs " +
                            std::to_string(names.size()) + " relations)");
  }
}

void FeaturizedModel::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  write_pod(out, static_cast<std::uint32_t>(dim_));
  write_pod(out, static_cast<std::uint32_t>(hash_bits_));
  write_pod(out, seed_);
  write_pod(out, static_cast<std::uint32_t>(relation_names_.size()));
  for (const std::string& name : relation_names_) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  write_array(out, relation_);
  write_array(out, question_);
  write_array(out, recurrence_);
  write_array(out, bias_);
  write_pod(out, overlap_weight_);
}

FeaturizedModel FeaturizedModel::load(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ParseError("checkpoint: not a featurized scorer checkpoint");
  }
  FeaturizedConfig config;
  config.dim = read_pod<std::uint32_t>(in);
  config.hash_bits = read_pod<std::uint32_t>(in);
  config.seed = read_pod<std::uint64_t>(in);
  const auto n_rel = read_pod<std::uint32_t>(in);
  if (config.dim == 0 || config.dim > 4096 || config.hash_bits < 1 || config.hash_bits > 24 ||
      n_rel == 0 || n_rel > (1u << 24)) {
    throw ParseError("checkpoint: implausible dimensions");
  }
  std::vector<std::string> names(n_rel);
  for (std::string& name : names) {
    const auto len = read_pod<std::uint32_t>(in);
    if (len > (1u << 20)) throw ParseError("checkpoint: implausible relation name length");
    name.resize(len);
    in.read(name.data(), len);
    if (!in) throw ParseError("checkpoint: truncated relation table");
  }
  FeaturizedModel model(std::move(names), config);
  read_array(in, model.relation_);
  read_array(in, model.question_);
  read_array(in, model.recurrence_);
  read_array(in, model.bias_);
  model.overlap_weight_ = read_pod<double>(in);
  return model;
}

void FeaturizedModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write checkpoint " + path);
  save(out);
  if (!out) throw PreconditionError("failed writing checkpoint " + path);
}

FeaturizedModel FeaturizedModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path);
  return load(in);
}

bool operator==(const FeaturizedModel& a, const FeaturizedModel& b) {
  return a.relation_names_ == b.relation_names_ && a.dim_ == b.dim_ &&
         a.hash_bits_ == b.hash_bits_ && a.seed_ == b.seed_ && a.relation_ == b.relation_ &&
         a.question_ == b.question_ && a.recurrence_ == b.recurrence_ && a.bias_ == b.bias_ &&
         a.overlap_weight_ == b.overlap_weight_;
}

double gradient_check(FeaturizedModel& model, const ScoreRequest& req, RelationId gold) {
  using Block = FeaturizedModel::Block;
  constexpr double kStep = 1e-5;
  FeaturizedGradient grad;
  model.loss_and_gradient(req, gold, grad);
  const std::size_t d = model.dim();

  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + kStep;
    const double up = model.loss(req, gold);
    param = saved - kStep;
    const double down = model.loss(req, gold);
    param = saved;
    const double numeric = (up - down) / (2 * kStep);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-5});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };

  // Every relation row the request reads, whether or not it has a gradient.
  std::vector<RelationId> rels(req.options.begin(), req.options.end());
  for (RelationId r : req.prefix.relations()) rels.push_back(r);
  std::sort(rels.begin(), rels.end());
  rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
  auto relation = model.parameters(Block::kRelation);
  for (RelationId r : rels) {
    auto it = grad.relation.find(r);
    for (std::size_t k = 0; k < d; ++k) {
      check(relation[r * d + k], it == grad.relation.end() ? 0.0 : it->second[k]);
    }
  }
  auto features = model.question_features(req.question, req.prefix.size());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  auto question = model.parameters(Block::kQuestion);
  for (std::uint32_t b : features) {
    const auto& g = grad.question.at(b);
    for (std::size_t k = 0; k < d; ++k) check(question[b * d + k], g[k]);
  }
  auto recurrence = model.parameters(Block::kRecurrence);
  for (std::size_t i = 0; i < recurrence.size(); ++i) check(recurrence[i], grad.recurrence[i]);
  auto bias = model.parameters(Block::kBias);
  for (RelationId r : req.options) check(bias[r], grad.bias.at(r));
  check(model.parameters(Block::kOverlap)[0], grad.overlap);
  return worst;
}

}  // namespace kgseek
