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

#include "kgseek/epfo.h"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "kgseek/errors.h"

namespace kgseek {
namespace {

EntitySet anchors_of(const std::vector<Variable>& vars) {
  std::vector<EntityId> ids;
  for (const Variable& v : vars) {
    if (v.kind == VarKind::kAnchor) ids.push_back(v.entity);
  }
  return EntitySet(std::move(ids));
}

std::vector<Conjunct> dnf_of(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::kAtom:
      return {Conjunct{{f.atom}}};
    case Formula::Kind::kOr: {
      std::vector<Conjunct> out;
      for (const Formula& c : f.children) {
        auto part = dnf_of(c);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case Formula::Kind::kAnd: {
      std::vector<Conjunct> acc{Conjunct{}};
      for (const Formula& c : f.children) {
        const auto part = dnf_of(c);
        std::vector<Conjunct> next;
        next.reserve(acc.size() * part.size());
        for (const Conjunct& a : acc) {
          for (const Conjunct& b : part) {
            Conjunct merged = a;
            merged.atoms.insert(merged.atoms.end(), b.atoms.begin(), b.atoms.end());
            next.push_back(std::move(merged));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

// Dependency graph of one conjunct restricted to the variables it mentions.
struct DependencyGraph {
  std::vector<VarId> nodes;                           // sorted
  std::map<VarId, std::vector<std::pair<RelationId, VarId>>> out;  // sorted adjacency
  std::map<VarId, std::size_t> in_degree;
};

DependencyGraph dependency_graph(const Conjunct& c) {
  DependencyGraph dg;
  std::set<VarId> nodes;
  for (const Atom& a : c.atoms) {
    nodes.insert(a.subject);
    nodes.insert(a.object);
    dg.out[a.subject].push_back({a.relation, a.object});
    ++dg.in_degree[a.object];
  }
  dg.nodes.assign(nodes.begin(), nodes.end());
  for (auto& [v, edges] : dg.out) std::sort(edges.begin(), edges.end());
  return dg;
}

std::string check_conjunct(const KnowledgeGraph& g, const std::vector<Variable>& vars,
                           VarId target, const Conjunct& c) {
  if (c.atoms.empty()) return "conjunct has no atoms";
  bool target_is_object = false;
  for (const Atom& a : c.atoms) {
    if (a.subject >= vars.size() || a.object >= vars.size()) return "atom references unknown variable";
    if (a.relation == kSelfRelation || a.relation >= g.num_relations()) {
      return "atom uses invalid relation id " + std::to_string(a.relation);
    }
    if (a.subject == a.object) {
      return "atom relates '" + vars[a.subject].name + "' to itself";
    }
    if (vars[a.object].kind == VarKind::kAnchor) {
      return "anchor '" + vars[a.object].name + "' used as an atom object";
    }
    if (a.subject == target) return "target variable is the subject of an atom; it must be the unique sink";
    if (a.object == target) target_is_object = true;
  }
  if (!target_is_object) return "target variable does not appear as an atom object";

  const DependencyGraph dg = dependency_graph(c);

  // Kahn's algorithm for acyclicity.
  std::map<VarId, std::size_t> indeg = dg.in_degree;
  std::vector<VarId> queue;
  for (VarId v : dg.nodes) {
    if (indeg[v] == 0) queue.push_back(v);
  }
  std::size_t seen = 0;
  while (!queue.empty()) {
    const VarId v = queue.back();
    queue.pop_back();
    ++seen;
    auto it = dg.out.find(v);
    if (it == dg.out.end()) continue;
    for (const auto& [r, w] : it->second) {
      if (--indeg[w] == 0) queue.push_back(w);
    }
  }
  if (seen != dg.nodes.size()) return "dependency graph has a cycle";

  for (VarId v : dg.nodes) {
    const bool is_source = dg.in_degree.count(v) == 0;
    const bool is_sink = dg.out.count(v) == 0;
    if (is_source && vars[v].kind != VarKind::kAnchor) {
      return "source '" + vars[v].name + "' is not an anchor";
    }
    if (is_sink && v != target) return "sink '" + vars[v].name + "' is not the target";
  }

  // Forward reachability from anchors and backward from the target.
  std::set<VarId> from_anchor;
  std::vector<VarId> stack;
  for (VarId v : dg.nodes) {
    if (vars[v].kind == VarKind::kAnchor) {
      from_anchor.insert(v);
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const VarId v = stack.back();
    stack.pop_back();
    auto it = dg.out.find(v);
    if (it == dg.out.end()) continue;
    for (const auto& [r, w] : it->second) {
      if (from_anchor.insert(w).second) stack.push_back(w);
    }
  }
  std::set<VarId> to_target{target};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const Atom& a : c.atoms) {
      if (to_target.count(a.object) && to_target.insert(a.subject).second) grew = true;
    }
  }
  for (VarId v : dg.nodes) {
    if (vars[v].kind == VarKind::kBound && (!from_anchor.count(v) || !to_target.count(v))) {
      return "bound variable '" + vars[v].name + "' is not on an anchor-to-target path";
    }
  }
  return {};
}

// Backtracking satisfiability of one conjunct with the target fixed.
class ConjunctSolver {
 public:
  ConjunctSolver(const KnowledgeGraph& g, const std::vector<Variable>& vars, VarId target,
                 const Conjunct& c)
      : g_(g), assignment_(vars.size(), kUnassigned) {
    std::set<VarId> bound;
    for (const Atom& a : c.atoms) {
      for (VarId v : {a.subject, a.object}) {
        if (vars[v].kind == VarKind::kBound) bound.insert(v);
        if (vars[v].kind == VarKind::kAnchor) assignment_[v] = vars[v].entity;
      }
    }
    order_.assign(bound.begin(), bound.end());
    target_ = target;
    // checks_[d]: atoms whose last variable is assigned at depth d
    // (depth 0 = only target and anchors assigned).
    checks_.resize(order_.size() + 1);
    for (const Atom& a : c.atoms) {
      std::size_t depth = 0;
      for (VarId v : {a.subject, a.object}) {
        auto it = std::find(order_.begin(), order_.end(), v);
        if (it != order_.end()) {
          depth = std::max(depth, static_cast<std::size_t>(it - order_.begin()) + 1);
        }
      }
      checks_[depth].push_back(a);
    }
  }

  bool satisfiable(EntityId target_value) {
    assignment_[target_] = target_value;
    return extend(0);
  }

 private:
  static constexpr EntityId kUnassigned = ~EntityId{0};

  bool holds(std::size_t depth) const {
    for (const Atom& a : checks_[depth]) {
      if (!g_.has_edge(assignment_[a.subject], a.relation, assignment_[a.object])) return false;
    }
    return true;
  }

  bool extend(std::size_t depth) {
    if (!holds(depth)) return false;
    if (depth == order_.size()) return true;
    const VarId v = order_[depth];
    for (EntityId e = 0; e < g_.num_entities(); ++e) {
      assignment_[v] = e;
      if (extend(depth + 1)) return true;
    }
    assignment_[v] = kUnassigned;
    return false;
  }

  const KnowledgeGraph& g_;
  std::vector<EntityId> assignment_;
  std::vector<VarId> order_;
  std::vector<std::vector<Atom>> checks_;
  VarId target_ = 0;
};

bool formula_holds(const KnowledgeGraph& g, const Formula& f,
                   const std::vector<EntityId>& assignment) {
  switch (f.kind) {
    case Formula::Kind::kAtom:
      return g.has_edge(assignment[f.atom.subject], f.atom.relation, assignment[f.atom.object]);
    case Formula::Kind::kAnd:
      return std::all_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return formula_holds(g, c, assignment); });
    case Formula::Kind::kOr:
      return std::any_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return formula_holds(g, c, assignment); });
  }
  return false;
}

}  // namespace

EntitySet EpfoQuery::anchor_entities() const { return anchors_of(vars); }
EntitySet DnfQuery::anchor_entities() const { return anchors_of(vars); }

DnfQuery to_dnf(const EpfoQuery& q) {
  DnfQuery dnf;
  dnf.vars = q.vars;
  dnf.target = q.target;
  dnf.conjuncts = dnf_of(q.body);
  for (Conjunct& c : dnf.conjuncts) {
    std::sort(c.atoms.begin(), c.atoms.end());
    c.atoms.erase(std::unique(c.atoms.begin(), c.atoms.end()), c.atoms.end());
  }
  std::sort(dnf.conjuncts.begin(), dnf.conjuncts.end());
  dnf.conjuncts.erase(std::unique(dnf.conjuncts.begin(), dnf.conjuncts.end()),
                      dnf.conjuncts.end());
  return dnf;
}

ValidityReport validate(const KnowledgeGraph& g, const DnfQuery& q) {
  if (q.target >= q.vars.size() || q.vars[q.target].kind != VarKind::kTarget) {
    return {false, 0, "query has no target variable"};
  }
  if (q.conjuncts.empty()) return {false, 0, "query has no conjuncts"};
  for (const Variable& v : q.vars) {
    if (v.kind == VarKind::kAnchor && v.entity >= g.num_entities()) {
      return {false, 0, "anchor '" + v.name + "' is not an entity of the graph"};
    }
  }
  for (std::size_t i = 0; i < q.conjuncts.size(); ++i) {
    std::string reason = check_conjunct(g, q.vars, q.target, q.conjuncts[i]);
    if (!reason.empty()) return {false, i, std::move(reason)};
  }
  return {};
}

EntitySet evaluate(const KnowledgeGraph& g, const DnfQuery& q) {
  std::vector<EntityId> answers;
  std::vector<ConjunctSolver> solvers;
  solvers.reserve(q.conjuncts.size());
  for (const Conjunct& c : q.conjuncts) solvers.emplace_back(g, q.vars, q.target, c);
  for (EntityId v = 0; v < g.num_entities(); ++v) {
    for (ConjunctSolver& s : solvers) {
      if (s.satisfiable(v)) {
        answers.push_back(v);
        break;
      }
    }
  }
  return EntitySet::from_sorted_unique(std::move(answers));
}

EntitySet evaluate_formula(const KnowledgeGraph& g, const EpfoQuery& q) {
  std::vector<VarId> free;
  std::vector<EntityId> assignment(q.vars.size(), 0);
  for (VarId v = 0; v < q.vars.size(); ++v) {
    if (q.vars[v].kind == VarKind::kAnchor) {
      assignment[v] = q.vars[v].entity;
    } else if (v != q.target) {
      free.push_back(v);
    }
  }
  std::vector<EntityId> answers;
  const std::size_t n = g.num_entities();
  for (EntityId t = 0; t < n; ++t) {
    assignment[q.target] = t;
    // Odometer over all bound-variable assignments.
    std::vector<EntityId> digits(free.size(), 0);
    bool found = false;
    while (!found && n > 0) {
      for (std::size_t i = 0; i < free.size(); ++i) assignment[free[i]] = digits[i];
      found = formula_holds(g, q.body, assignment);
      std::size_t i = 0;
      while (i < digits.size() && ++digits[i] == n) digits[i++] = 0;
      if (i == digits.size()) break;
    }
    if (found) answers.push_back(t);
  }
  return EntitySet::from_sorted_unique(std::move(answers));
}

std::vector<RelationSeq> cover_sequences(const KnowledgeGraph& g, const DnfQuery& q) {
  const ValidityReport report = validate(g, q);
  if (!report) {
    throw PreconditionError("cover_sequences: invalid query (conjunct " +
                            std::to_string(report.conjunct) + "): " + report.reason);
  }
  std::vector<RelationSeq> out;
  for (const Conjunct& c : q.conjuncts) {
    const DependencyGraph dg = dependency_graph(c);
    // Smallest label sequence from v to the target, memoized per variable.
    std::map<VarId, std::vector<RelationId>> best;
    std::function<const std::vector<RelationId>&(VarId)> smallest =
        [&](VarId v) -> const std::vector<RelationId>& {
      if (auto it = best.find(v); it != best.end()) return it->second;
      std::vector<RelationId> result;
      bool have = false;
      if (v != q.target) {
        for (const auto& [r, w] : dg.out.at(v)) {
          std::vector<RelationId> candidate{r};
          const auto& tail = smallest(w);
          candidate.insert(candidate.end(), tail.begin(), tail.end());
          if (!have || candidate < result) {
            result = std::move(candidate);
            have = true;
          }
        }
      }
      return best.emplace(v, std::move(result)).first->second;
    };
    std::vector<RelationId> chosen;
    bool have = false;
    for (VarId v : dg.nodes) {
      if (q.vars[v].kind != VarKind::kAnchor) continue;
      const auto& labels = smallest(v);
      if (!have || labels < chosen) {
        chosen = labels;
        have = true;
      }
    }
    RelationSeq seq = RelationSeq::from_hops(chosen);
    if (std::find(out.begin(), out.end(), seq) == out.end()) out.push_back(std::move(seq));
  }
  return out;
}

DnfQuery random_query(const KnowledgeGraph& g, std::size_t max_conjuncts, std::size_t max_atoms,
                      std::uint64_t seed) {
  if (g.num_entities() == 0) throw PreconditionError("random_query: graph has no entities");
  if (g.num_relations() < 2) throw PreconditionError("random_query: graph has no relations");
  max_conjuncts = std::max<std::size_t>(max_conjuncts, 1);
  max_atoms = std::max<std::size_t>(max_atoms, 1);

  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t n = g.num_entities();

  // Incoming edges per node, for anchoring extra atoms on real facts.
  std::vector<std::vector<Triple>> in_edges(n);
  for (const Triple& t : g.edges()) in_edges[t.object].push_back(t);

  EpfoQuery q;
  q.vars.push_back({"x", VarKind::kTarget, 0});
  q.target = 0;
  std::map<EntityId, VarId> anchor_var;
  auto anchor_for = [&](EntityId e) {
    auto it = anchor_var.find(e);
    if (it != anchor_var.end()) return it->second;
    const auto id = static_cast<VarId>(q.vars.size());
    q.vars.push_back({"a" + std::to_string(anchor_var.size()), VarKind::kAnchor, e});
    anchor_var.emplace(e, id);
    return id;
  };
  std::size_t bound_count = 0;
  auto new_bound = [&] {
    const auto id = static_cast<VarId>(q.vars.size());
    q.vars.push_back({"v" + std::to_string(bound_count++), VarKind::kBound, 0});
    return id;
  };
  auto random_relation = [&] { return static_cast<RelationId>(uniform(1, g.num_relations() - 1)); };
  auto pick_start = [&] {
    if (!anchor_var.empty() && uniform(0, 1) == 0) {
      auto it = anchor_var.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(uniform(0, anchor_var.size() - 1)));
      return it->first;
    }
    EntityId e = static_cast<EntityId>(uniform(0, n - 1));
    for (int attempt = 0; attempt < 32 && g.out_edges(e).empty(); ++attempt) {
      e = static_cast<EntityId>(uniform(0, n - 1));
    }
    return e;
  };

  std::vector<Formula> disjuncts;
  const std::size_t n_conjuncts = uniform(1, max_conjuncts);
  for (std::size_t ci = 0; ci < n_conjuncts; ++ci) {
    const std::size_t budget = uniform(1, max_atoms);
    const std::size_t chain = uniform(1, budget);
    std::vector<Formula> atoms;
    std::vector<std::pair<VarId, EntityId>> chain_vars;  // non-anchor vars with witnesses

    EntityId cur = pick_start();
    VarId cur_var = anchor_for(cur);
    for (std::size_t i = 0; i < chain; ++i) {
      RelationId r;
      EntityId next;
      const auto edges = g.out_edges(cur);
      if (!edges.empty()) {
        const Triple& t = edges[uniform(0, edges.size() - 1)];
        r = t.relation;
        next = t.object;
      } else {
        r = random_relation();
        next = static_cast<EntityId>(uniform(0, n - 1));
      }
      const VarId next_var = i + 1 == chain ? q.target : new_bound();
      atoms.push_back(Formula::make_atom({r, cur_var, next_var}));
      chain_vars.push_back({next_var, next});
      cur = next;
      cur_var = next_var;
    }
    // Extra atoms hang an anchor off an existing variable.
    for (std::size_t extra = chain; extra < budget; ++extra) {
      const auto& [var, witness] = chain_vars[uniform(0, chain_vars.size() - 1)];
      if (!in_edges[witness].empty()) {
        const Triple& t = in_edges[witness][uniform(0, in_edges[witness].size() - 1)];
        atoms.push_back(Formula::make_atom({t.relation, anchor_for(t.subject), var}));
      } else {
        const auto e = static_cast<EntityId>(uniform(0, n - 1));
        atoms.push_back(Formula::make_atom({random_relation(), anchor_for(e), var}));
      }
    }
    disjuncts.push_back(atoms.size() == 1 ? atoms.front() : Formula::make_and(std::move(atoms)));
  }
  q.body = disjuncts.size() == 1 ? disjuncts.front() : Formula::make_or(std::move(disjuncts));
  return to_dnf(q);
}

}  // namespace kgseek
