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

#include "kgseek/qa_dataset.h"

#include <fstream>
#include <istream>
#include <ostream>

#include "kgseek/errors.h"

namespace kgseek {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

EntitySet entity_list(std::string_view field, const KnowledgeGraph& g, std::size_t line,
                      const char* what) {
  std::vector<EntityId> ids;
  for (std::string_view name : split(field, '|')) {
    name = trim(name);
    if (name.empty()) continue;
    auto id = g.find_entity(name);
    if (!id) {
      throw LookupError("line " + std::to_string(line) + ": unknown " + what + " entity '" +
                        std::string(name) + "'");
    }
    ids.push_back(*id);
  }
  if (ids.empty()) throw ParseError(std::string("no ") + what + " entities", line);
  return EntitySet(std::move(ids));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')) {
      cur.push_back(ch);
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

RelationSeq parse_relation_seq(std::string_view text, const KnowledgeGraph& g) {
  std::vector<RelationId> hops;
  for (std::string_view name : split(text, ' ')) {
    name = trim(name);
    if (name.empty() || name == kSelfRelationName) continue;
    hops.push_back(g.relation_id(name));
  }
  return RelationSeq::from_hops(hops);
}

std::vector<QAExample> read_qa(std::istream& in, const KnowledgeGraph& g) {
  std::vector<QAExample> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split(view, '\t');
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError("expected 3 or 4 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line_number);
    }
    QAExample ex;
    ex.question = tokenize(fields[0]);
    if (ex.question.empty()) throw ParseError("empty question", line_number);
    ex.anchors = entity_list(fields[1], g, line_number, "anchor");
    ex.answers = entity_list(fields[2], g, line_number, "answer");
    if (fields.size() == 4) {
      for (std::string_view seq : split(fields[3], '|')) {
        if (!trim(seq).empty()) ex.gold_sequences.push_back(parse_relation_seq(seq, g));
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<QAExample> load_qa(const std::string& path, const KnowledgeGraph& g) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset " + path);
  return read_qa(in, g);
}

void write_qa(std::ostream& out, const KnowledgeGraph& g, std::span<const QAExample> examples) {
  auto names = [&](const EntitySet& s) {
    std::string joined;
    s.for_each([&](EntityId v) {
      if (!joined.empty()) joined += '|';
      joined += g.entity_name(v);
    });
    return joined;
  };
  for (const QAExample& ex : examples) {
    for (std::size_t i = 0; i < ex.question.size(); ++i) out << (i ? " " : "") << ex.question[i];
    out << '\t' << names(ex.anchors) << '\t' << names(ex.answers);
    if (!ex.gold_sequences.empty()) {
      out << '\t';
      for (std::size_t i = 0; i < ex.gold_sequences.size(); ++i) {
        const auto hops = ex.gold_sequences[i].hop_relations();
        if (i) out << '|';
        for (std::size_t j = 0; j < hops.size(); ++j) {
          out << (j ? " " : "") << g.relation_name(hops[j]);
        }
      }
    }
    out << '\n';
  }
}

}  // namespace kgseek
