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

#include "kgseek/refiner.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "kgseek/errors.h"
#include "kgseek/kernels.h"

namespace kgseek {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

std::uint32_t token_bucket(std::string_view token, std::size_t hash_bits) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return static_cast<std::uint32_t>(h >> (64 - hash_bits));
}

// y = M x for a row-major d x d matrix.
void matvec(std::span<const double> m, std::span<const double> x, std::span<double> y) {
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) y[i] = kernels::dot(m.subspan(i * d, d), x);
}

// y += M^T x
void matvec_t_add(std::span<const double> m, std::span<const double> x, std::span<double> y) {
  const std::size_t d = x.size();
  for (std::size_t i = 0; i < d; ++i) kernels::axpy(x[i], m.subspan(i * d, d), y);
}

// G += a b^T
void outer_add(std::span<const double> a, std::span<const double> b, std::span<double> g) {
  const std::size_t d = a.size();
  for (std::size_t i = 0; i < d; ++i) kernels::axpy(a[i], b, g.subspan(i * d, d));
}

}  // namespace

struct RefinerModel::Trace {
  std::vector<std::uint32_t> features;
  double feature_scale = 0.0;
  std::vector<double> q;
  std::vector<double> gates;  // per relation
  // states[k] and messages[k]: n x d, row-major; states has rounds + 1 layers.
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> messages;
  std::vector<double> scores;
  std::vector<char> is_anchor;
};

RefinerModel::RefinerModel(std::size_t num_relations, const RefinerConfig& config)
    : num_relations_(num_relations),
      dim_(config.dim),
      hash_bits_(config.hash_bits),
      rounds_(config.rounds) {
  if (dim_ == 0 || rounds_ == 0) throw PreconditionError("refiner: dim and rounds must be >= 1");
  if (hash_bits_ < 1 || hash_bits_ > 24) throw PreconditionError("refiner: hash_bits out of range");
  const std::size_t d = dim_;
  question_.assign((std::size_t{1} << hash_bits_) * d, 0.0);
  anchor_.assign(d, 0.0);
  self_.assign(d * d, 0.0);
  message_.assign(d * d, 0.0);
  bias_.assign(d, 0.0);
  gate_.assign(num_relations_ * d, 0.0);
  gate_bias_.assign(num_relations_, 0.0);
  out_.assign(d, 0.0);

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, config.init_scale);
  const double mat_scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::normal_distribution<double> mat(0.0, mat_scale);
  for (double& w : question_) w = normal(rng);
  for (double& w : anchor_) w = normal(rng) + 1.0 / std::sqrt(static_cast<double>(d));
  for (double& w : self_) w = mat(rng);
  for (double& w : message_) w = mat(rng);
  for (double& w : gate_) w = normal(rng);
  for (double& w : out_) w = normal(rng);
}

std::vector<std::uint32_t> RefinerModel::question_features(
    std::span<const std::string> question) const {
  std::vector<std::uint32_t> out{token_bucket("", hash_bits_)};
  for (const std::string& tok : question) out.push_back(token_bucket(tok, hash_bits_));
  return out;
}

RefinerModel::Trace RefinerModel::run(const KnowledgeGraph& sub,
                                      std::span<const std::string> question,
                                      const EntitySet& anchors) const {
  const std::size_t d = dim_;
  const std::size_t n = sub.num_entities();
  if (sub.num_relations() > num_relations_) {
    throw PreconditionError("refiner: graph has more relations than the model");
  }
  Trace tr;
  tr.features = question_features(question);
  tr.feature_scale = 1.0 / std::sqrt(static_cast<double>(tr.features.size()));
  tr.q.assign(d, 0.0);
  for (std::uint32_t b : tr.features) kernels::axpy(tr.feature_scale, {&question_[b * d], d}, tr.q);

  tr.gates.resize(num_relations_);
  for (std::size_t r = 0; r < num_relations_; ++r) {
    tr.gates[r] = sigmoid(kernels::dot({&gate_[r * d], d}, tr.q) + gate_bias_[r]);
  }

  tr.is_anchor.assign(n, 0);
  anchors.for_each([&](EntityId v) {
    if (v >= n) throw PreconditionError("refiner: anchor is not a node of the subgraph");
    tr.is_anchor[v] = 1;
  });

  std::vector<double> h0(n * d);
  for (std::size_t v = 0; v < n; ++v) {
    std::span<double> hv(&h0[v * d], d);
    std::copy(tr.q.begin(), tr.q.end(), hv.begin());
    if (tr.is_anchor[v]) kernels::axpy(1.0, anchor_, hv);
  }
  tr.states.push_back(std::move(h0));

  std::vector<double> z(d);
  std::vector<double> bm(d);
  for (std::size_t k = 0; k < rounds_; ++k) {
    const std::vector<double>& h = tr.states.back();
    std::vector<double> m(n * d, 0.0);
    for (const Triple& e : sub.edges()) {
      kernels::axpy(tr.gates[e.relation], {&h[e.subject * d], d}, {&m[e.object * d], d});
    }
    std::vector<double> next(n * d);
    for (std::size_t v = 0; v < n; ++v) {
      matvec(self_, {&h[v * d], d}, z);
      matvec(message_, {&m[v * d], d}, bm);
      for (std::size_t i = 0; i < d; ++i) next[v * d + i] = std::tanh(z[i] + bm[i] + bias_[i]);
    }
    tr.messages.push_back(std::move(m));
    tr.states.push_back(std::move(next));
  }

  tr.scores.resize(n);
  const std::vector<double>& hT = tr.states.back();
  for (std::size_t v = 0; v < n; ++v) {
    tr.scores[v] = kernels::dot(out_, {&hT[v * d], d}) + out_bias_;
  }
  return tr;
}

std::vector<double> RefinerModel::node_scores(const KnowledgeGraph& sub,
                                              std::span<const std::string> question,
                                              const EntitySet& anchors) const {
  return run(sub, question, anchors).scores;
}

double RefinerModel::loss(const KnowledgeGraph& sub, std::span<const std::string> question,
                          const EntitySet& anchors, const EntitySet& candidates,
                          const EntitySet& answers, RefinerGradient* grad) const {
  if (candidates.empty()) throw PreconditionError("refiner: empty candidate set");
  const Trace tr = run(sub, question, anchors);
  const std::size_t n = sub.num_entities();
  const std::size_t d = dim_;
  const double m = static_cast<double>(candidates.size());

  std::vector<double> ds(n, 0.0);
  double total = 0.0;
  candidates.for_each([&](EntityId v) {
    if (v >= n) throw PreconditionError("refiner: candidate is not a node of the subgraph");
    const double y = answers.contains(v) ? 1.0 : 0.0;
    const double s = tr.scores[v];
    total += softplus(s) - y * s;
    ds[v] = (sigmoid(s) - y) / m;
  });
  const double mean = total / m;
  if (grad == nullptr) return mean;

  RefinerGradient& g = *grad;
  auto sized = [](std::vector<double>& v, std::size_t size) {
    if (v.size() != size) v.assign(size, 0.0);
  };
  sized(g.anchor, d);
  sized(g.self, d * d);
  sized(g.message, d * d);
  sized(g.bias, d);
  sized(g.gate, num_relations_ * d);
  sized(g.gate_bias, num_relations_);
  sized(g.out, d);

  // Readout.
  std::vector<double> dh(n * d, 0.0);
  const std::vector<double>& hT = tr.states.back();
  for (std::size_t v = 0; v < n; ++v) {
    if (ds[v] == 0.0) continue;
    g.out_bias += ds[v];
    kernels::axpy(ds[v], {&hT[v * d], d}, g.out);
    kernels::axpy(ds[v], out_, {&dh[v * d], d});
  }

  // Message-passing rounds, last to first.
  std::vector<double> dgate(num_relations_, 0.0);
  std::vector<double> dz(d);
  for (std::size_t k = rounds_; k-- > 0;) {
    const std::vector<double>& h = tr.states[k];
    const std::vector<double>& hn = tr.states[k + 1];
    const std::vector<double>& msg = tr.messages[k];
    std::vector<double> dh_prev(n * d, 0.0);
    std::vector<double> dm(n * d, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      bool any = false;
      for (std::size_t i = 0; i < d; ++i) {
        const double y = hn[v * d + i];
        dz[i] = dh[v * d + i] * (1.0 - y * y);
        any = any || dz[i] != 0.0;
      }
      if (!any) continue;
      outer_add(dz, {&h[v * d], d}, g.self);
      outer_add(dz, {&msg[v * d], d}, g.message);
      kernels::axpy(1.0, dz, g.bias);
      matvec_t_add(self_, dz, {&dh_prev[v * d], d});
      matvec_t_add(message_, dz, {&dm[v * d], d});
    }
    for (const Triple& e : sub.edges()) {
      std::span<const double> dmv(&dm[e.object * d], d);
      kernels::axpy(tr.gates[e.relation], dmv, {&dh_prev[e.subject * d], d});
      dgate[e.relation] += kernels::dot(dmv, {&h[e.subject * d], d});
    }
    dh = std::move(dh_prev);
  }

  // Initial states: h0_v = q + anchor_v * u.
  std::vector<double> dq(d, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    std::span<const double> dhv(&dh[v * d], d);
    kernels::axpy(1.0, dhv, dq);
    if (tr.is_anchor[v]) kernels::axpy(1.0, dhv, g.anchor);
  }
  for (std::size_t r = 0; r < num_relations_; ++r) {
    if (dgate[r] == 0.0) continue;
    const double da = dgate[r] * tr.gates[r] * (1.0 - tr.gates[r]);
    kernels::axpy(da, tr.q, {&g.gate[r * d], d});
    g.gate_bias[r] += da;
    kernels::axpy(da, {&gate_[r * d], d}, dq);
  }
  for (std::uint32_t b : tr.features) {
    auto [it, inserted] = g.question.try_emplace(b);
    if (inserted) it->second.assign(d, 0.0);
    kernels::axpy(tr.feature_scale, dq, it->second);
  }
  return mean;
}

void RefinerModel::apply(const RefinerGradient& g, double lr) {
  const std::size_t d = dim_;
  for (const auto& [b, row] : g.question) kernels::axpy(-lr, row, {&question_[b * d], d});
  auto step = [lr](const std::vector<double>& grad, std::vector<double>& w) {
    if (!grad.empty()) kernels::axpy(-lr, grad, w);
  };
  step(g.anchor, anchor_);
  step(g.self, self_);
  step(g.message, message_);
  step(g.bias, bias_);
  step(g.gate, gate_);
  step(g.gate_bias, gate_bias_);
  step(g.out, out_);
  out_bias_ -= lr * g.out_bias;
}

std::span<double> RefinerModel::parameters(Block b) {
  switch (b) {
    case Block::kQuestion: return question_;
    case Block::kAnchor: return anchor_;
    case Block::kSelf: return self_;
    case Block::kMessage: return message_;
    case Block::kBias: return bias_;
    case Block::kGate: return gate_;
    case Block::kGateBias: return gate_bias_;
    case Block::kOut: return out_;
    case Block::kOutBias: return {&out_bias_, 1};
  }
  return {};
}

std::span<const double> RefinerModel::parameters(Block b) const {
  return const_cast<RefinerModel*>(this)->parameters(b);
}

bool RefinerModel::all_finite() const {
  for (Block b : {Block::kQuestion, Block::kAnchor, Block::kSelf, Block::kMessage, Block::kBias,
                  Block::kGate, Block::kGateBias, Block::kOut, Block::kOutBias}) {
    for (double w : parameters(b)) {
      if (!std::isfinite(w)) return false;
    }
  }
  return true;
}

namespace {

constexpr char kRefinerMagic[8] = {'K', 'G', 'S', 'K', 'R', 'F', '0', '1'};

void write_u32(std::ostream& out, std::size_t v) {
  const auto x = static_cast<std::uint32_t>(v);
  out.write(reinterpret_cast<const char*>(&x), sizeof x);
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t x = 0;
  in.read(reinterpret_cast<char*>(&x), sizeof x);
  if (!in) throw ParseError("refiner checkpoint: truncated file");
  return x;
}

}  // namespace

void RefinerModel::save(std::ostream& out) const {
  out.write(kRefinerMagic, sizeof kRefinerMagic);
  write_u32(out, num_relations_);
  write_u32(out, dim_);
  write_u32(out, hash_bits_);
  write_u32(out, rounds_);
  for (Block b : {Block::kQuestion, Block::kAnchor, Block::kSelf, Block::kMessage, Block::kBias,
                  Block::kGate, Block::kGateBias, Block::kOut, Block::kOutBias}) {
    const auto p = parameters(b);
    out.write(reinterpret_cast<const char*>(p.data()),
              static_cast<std::streamsize>(p.size() * sizeof(double)));
  }
}

RefinerModel RefinerModel::load(std::istream& in) {
  char magic[sizeof kRefinerMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kRefinerMagic, sizeof magic) != 0) {
    throw ParseError("not a refiner checkpoint");
  }
  const std::uint32_t n_rel = read_u32(in);
  RefinerConfig config;
  config.dim = read_u32(in);
  config.hash_bits = read_u32(in);
  config.rounds = read_u32(in);
  if (n_rel == 0 || n_rel > (1u << 24) || config.dim == 0 || config.dim > 1024 ||
      config.hash_bits < 1 || config.hash_bits > 24 || config.rounds == 0 || config.rounds > 64) {
    throw ParseError("refiner checkpoint: implausible dimensions");
  }
  RefinerModel model(n_rel, config);
  for (Block b : {Block::kQuestion, Block::kAnchor, Block::kSelf, Block::kMessage, Block::kBias,
                  Block::kGate, Block::kGateBias, Block::kOut, Block::kOutBias}) {
    auto p = model.parameters(b);
    in.read(reinterpret_cast<char*>(p.data()), static_cast<std::streamsize>(p.size() * sizeof(double)));
    if (!in) throw ParseError("refiner checkpoint: truncated parameter block");
  }
  return model;
}

void RefinerModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write checkpoint " + path);
  save(out);
}

RefinerModel RefinerModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path);
  return load(in);
}

std::vector<RankedCandidate> refine(const RefinerModel& model, const KnowledgeGraph& sub,
                                    std::span<const std::string> question,
                                    const EntitySet& anchors, const EntitySet& candidates) {
  if (candidates.empty()) throw PreconditionError("refine: empty candidate set");
  std::vector<RankedCandidate> ranked;
  candidates.for_each([&](EntityId v) {
    if (v >= sub.num_entities()) {
      throw PreconditionError("refine: candidate " + std::to_string(v) +
                              " is not a node of the subgraph");
    }
    ranked.push_back({v, 0.0});
  });
  const std::vector<double> scores = model.node_scores(sub, question, anchors);
  for (RankedCandidate& c : ranked) c.score = scores[c.entity];
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a,
                                                    const RankedCandidate& b) {
    return a.score > b.score;
  });
  return ranked;
}

RefinerTrainReport train_refiner(RefinerModel& model, std::span<const RefinerEpisode> episodes,
                                 std::size_t epochs, double lr, std::uint64_t seed) {
  RefinerTrainReport report;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    if (episodes[i].candidates.intersection_size(episodes[i].answers) == 0) {
      ++report.episodes_skipped;
    } else {
      usable.push_back(i);
    }
  }
  report.episodes_used = usable.size();
  std::mt19937_64 rng(seed);
  for (std::size_t epoch = 0; epoch < epochs && !usable.empty(); ++epoch) {
    std::shuffle(usable.begin(), usable.end(), rng);
    double total = 0.0;
    for (std::size_t i : usable) {
      const RefinerEpisode& ep = episodes[i];
      RefinerGradient grad;
      total += model.loss(ep.sub.graph, ep.question, ep.anchors, ep.candidates, ep.answers, &grad);
      model.apply(grad, lr);
    }
    const double mean = total / static_cast<double>(usable.size());
    if (!std::isfinite(mean) || !model.all_finite()) {
      throw TrainingError("train_refiner: non-finite loss at epoch " + std::to_string(epoch));
    }
    report.epoch_loss.push_back(mean);
  }
  return report;
}

double refiner_gradient_check(RefinerModel& model, const RefinerEpisode& ep) {
  using Block = RefinerModel::Block;
  constexpr double kStep = 1e-5;
  RefinerGradient grad;
  model.loss(ep.sub.graph, ep.question, ep.anchors, ep.candidates, ep.answers, &grad);
  auto f = [&] {
    return model.loss(ep.sub.graph, ep.question, ep.anchors, ep.candidates, ep.answers, nullptr);
  };
  double worst = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + kStep;
    const double up = f();
    param = saved - kStep;
    const double down = f();
    param = saved;
    const double numeric = (up - down) / (2 * kStep);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-5});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };
  auto check_block = [&](Block b, const std::vector<double>& g) {
    auto p = model.parameters(b);
    for (std::size_t i = 0; i < p.size(); ++i) check(p[i], g.empty() ? 0.0 : g[i]);
  };
  const std::size_t d = model.dim();
  auto features = model.question_features(ep.question);
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  auto question = model.parameters(Block::kQuestion);
  for (std::uint32_t b : features) {
    const auto& g = grad.question.at(b);
    for (std::size_t k = 0; k < d; ++k) check(question[b * d + k], g[k]);
  }
  check_block(Block::kAnchor, grad.anchor);
  check_block(Block::kSelf, grad.self);
  check_block(Block::kMessage, grad.message);
  check_block(Block::kBias, grad.bias);
  check_block(Block::kGate, grad.gate);
  check_block(Block::kGateBias, grad.gate_bias);
  check_block(Block::kOut, grad.out);
  check(model.parameters(Block::kOutBias)[0], grad.out_bias);
  return worst;
}

RefinerEpisode make_episode(const KnowledgeGraph& g, const QAExample& ex,
                            const SeekResult& result) {
  RefinerEpisode ep;
  ep.sub = candidate_subgraph(g, result);
  ep.question = ex.question;
  auto to_local = [&](const EntitySet& s) {
    std::vector<EntityId> ids;
    s.for_each([&](EntityId v) {
      if (auto local = ep.sub.to_local(v)) ids.push_back(*local);
    });
    return EntitySet(std::move(ids));
  };
  ep.anchors = to_local(ex.anchors);
  ep.candidates = to_local(result.candidates);
  std::vector<EntityId> answers;
  ex.answers.for_each([&](EntityId v) {
    if (result.candidates.contains(v)) answers.push_back(*ep.sub.to_local(v));
  });
  ep.answers = EntitySet(std::move(answers));
  return ep;
}

RefinerEval evaluate_refiner(const RefinerModel& model, std::span<const RefinerEpisode> episodes) {
  RefinerEval eval;
  for (const RefinerEpisode& ep : episodes) {
    if (ep.candidates.empty()) {
      ++eval.episodes;
      continue;
    }
    const auto ranked = refine(model, ep.sub.graph, ep.question, ep.anchors, ep.candidates);
    if (ep.answers.contains(ranked.front().entity)) eval.refined += 1.0;
    eval.unrefined += static_cast<double>(ep.candidates.intersection_size(ep.answers)) /
                      static_cast<double>(ep.candidates.size());
    ++eval.episodes;
  }
  if (eval.episodes > 0) {
    eval.refined /= static_cast<double>(eval.episodes);
    eval.unrefined /= static_cast<double>(eval.episodes);
  }
  return eval;
}

void write_ranked(std::ostream& out, const Subgraph& sub, std::span<const RankedCandidate> ranked) {
  out << "entity_name,score\n";
  const auto old = out.precision(10);
  for (const RankedCandidate& c : ranked) {
    out << sub.graph.entity_name(c.entity) << ',' << c.score << '\n';
  }
  out.precision(old);
}

}  // namespace kgseek
