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

// Question/answer records and their tab-separated file format:
//
//   question<TAB>anchor|anchor...<TAB>answer|answer...[<TAB>gold|gold...]
//
// The optional fourth field lists gold relation sequences as space-separated
// relation names without the leading self, e.g. "directed starred".

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgseek/entity_set.h"
#include "kgseek/kg_store.h"
#include "kgseek/relation_seq.h"

namespace kgseek {

// Lowercased ASCII alphanumeric runs; bytes >= 0x80 are kept inside tokens.
std::vector<std::string> tokenize(std::string_view text);

struct QAExample {
  std::vector<std::string> question;
  EntitySet anchors;
  EntitySet answers;
  std::vector<RelationSeq> gold_sequences;  // may be empty
};

// Parses "rel rel ..." into (self, rel, rel, ...). Throws LookupError for
// unknown names.
RelationSeq parse_relation_seq(std::string_view text, const KnowledgeGraph& g);

std::vector<QAExample> read_qa(std::istream& in, const KnowledgeGraph& g);
std::vector<QAExample> load_qa(const std::string& path, const KnowledgeGraph& g);
// The question is written as its space-joined tokens.
void write_qa(std::ostream& out, const KnowledgeGraph& g, std::span<const QAExample> examples);

}  // namespace kgseek
