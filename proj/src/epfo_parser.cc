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

#include <map>
#include <sstream>

#include "kgseek/epfo.h"
#include "kgseek/errors.h"

namespace kgseek {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

class QueryParser {
 public:
  QueryParser(std::string_view text, const KnowledgeGraph& g, const AnchorBindings& bindings)
      : g_(g) {
    for (const auto& [name, entity] : bindings) bindings_[name] = entity;
    tokenize(text);
  }

  EpfoQuery parse() {
    expect("(");
    if (next() != "select") fail("query must start with 'select'");
    const std::string target = next();
    if (target.size() < 2 || target[0] != '?') fail("select expects a ?variable, got '" + target + "'");
    q_.vars.push_back({target.substr(1), VarKind::kTarget, 0});
    q_.target = 0;
    var_ids_[target] = 0;
    q_.body = formula();
    expect(")");
    if (pos_ != tokens_.size()) fail("trailing input after query");
    return std::move(q_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError("query: " + what); }

  void tokenize(std::string_view text) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) tokens_.push_back(std::move(cur));
      cur.clear();
    };
    for (char c : text) {
      if (c == '(' || c == ')') {
        flush();
        tokens_.emplace_back(1, c);
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        flush();
      } else {
        cur.push_back(c);
      }
    }
    flush();
  }

  std::string next() {
    if (pos_ >= tokens_.size()) fail("unexpected end of input");
    return tokens_[pos_++];
  }

  void expect(std::string_view tok) {
    const std::string got = next();
    if (got != tok) fail("expected '" + std::string(tok) + "', got '" + got + "'");
  }

  VarId term(const std::string& tok) {
    if (auto it = var_ids_.find(tok); it != var_ids_.end()) return it->second;
    if (tok.size() < 2 || (tok[0] != '?' && tok[0] != '$')) {
      fail("expected $anchor or ?variable, got '" + tok + "'");
    }
    const std::string name = tok.substr(1);
    Variable v{name, VarKind::kBound, 0};
    if (tok[0] == '$') {
      v.kind = VarKind::kAnchor;
      auto b = bindings_.find(name);
      const std::string& entity = b == bindings_.end() ? name : b->second;
      auto id = g_.find_entity(entity);
      if (!id) throw LookupError("query: unknown anchor entity '" + entity + "'");
      v.entity = *id;
    }
    const auto id = static_cast<VarId>(q_.vars.size());
    q_.vars.push_back(std::move(v));
    var_ids_[tok] = id;
    return id;
  }

  Formula formula() {
    expect("(");
    const std::string head = next();
    if (head == "(" || head == ")") fail("expected operator or relation after '('");
    if (head == "forall" || head == "not" || head == "exists") {
      fail("'" + head + "' is not supported; only and/or over atoms");
    }
    if (head == "and" || head == "or") {
      std::vector<Formula> children;
      while (pos_ < tokens_.size() && tokens_[pos_] == "(") children.push_back(formula());
      expect(")");
      if (children.empty()) fail("'" + head + "' needs at least one operand");
      if (children.size() == 1) return std::move(children.front());
      return head == "and" ? Formula::make_and(std::move(children))
                           : Formula::make_or(std::move(children));
    }
    auto rel = g_.find_relation(head);
    if (!rel) throw LookupError("query: unknown relation '" + head + "'");
    if (*rel == kSelfRelation) fail("'self' cannot appear in a query atom");
    const VarId subject = term(next());
    const VarId object = term(next());
    expect(")");
    return Formula::make_atom({*rel, subject, object});
  }

  const KnowledgeGraph& g_;
  std::map<std::string, std::string> bindings_;
  std::map<std::string, VarId> var_ids_;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  EpfoQuery q_;
};

std::string sigil(const Variable& v) { return (v.kind == VarKind::kAnchor ? "$" : "?") + v.name; }

}  // namespace

EpfoQuery parse_query(std::string_view text, const KnowledgeGraph& g,
                      const AnchorBindings& bindings) {
  return QueryParser(text, g, bindings).parse();
}

EpfoQuery parse_query_line(std::string_view line, const KnowledgeGraph& g) {
  const auto tab = line.find('\t');
  AnchorBindings bindings;
  if (tab != std::string_view::npos) {
    std::string_view rest = trim(line.substr(tab + 1));
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw ParseError("query: malformed anchor binding '" + std::string(item) + "'");
      }
      bindings.emplace_back(std::string(trim(item.substr(0, eq))),
                            std::string(trim(item.substr(eq + 1))));
    }
    line = line.substr(0, tab);
  }
  return parse_query(line, g, bindings);
}

std::string format_query(const DnfQuery& q, const KnowledgeGraph& g) {
  std::ostringstream out;
  auto atom = [&](const Atom& a) {
    out << '(' << g.relation_name(a.relation) << ' ' << sigil(q.vars[a.subject]) << ' '
        << sigil(q.vars[a.object]) << ')';
  };
  auto conjunct = [&](const Conjunct& c) {
    if (c.atoms.size() == 1) {
      atom(c.atoms.front());
      return;
    }
    out << "(and";
    for (const Atom& a : c.atoms) {
      out << ' ';
      atom(a);
    }
    out << ')';
  };
  out << "(select " << sigil(q.vars[q.target]) << ' ';
  if (q.conjuncts.size() == 1) {
    conjunct(q.conjuncts.front());
  } else {
    out << "(or";
    for (const Conjunct& c : q.conjuncts) {
      out << ' ';
      conjunct(c);
    }
    out << ')';
  }
  out << ')';
  bool first = true;
  for (const Variable& v : q.vars) {
    if (v.kind != VarKind::kAnchor) continue;
    out << (first ? '\t' : ',') << v.name << '=' << g.entity_name(v.entity);
    first = false;
  }
  return out.str();
}

}  // namespace kgseek
