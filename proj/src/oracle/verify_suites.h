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

// Seeded property suites comparing the engine against the brute-force
// oracles. Shared by the `verify` subcommand and the acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

namespace kgseek::oracle {

struct SuiteResult {
  std::string name;
  std::string unit;  // what a passing case is called, e.g. "contained"
  std::size_t passed = 0;
  std::size_t total = 0;
  std::vector<std::string> failures;  // each names the seed that reproduces it
  double seconds = 0.0;

  bool ok() const { return passed == total; }
  // e.g. "prop1: 1000/1000 contained"
  std::string summary() const;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::size_t cases = 0;  // 0 = suite default
  // Test-only: corrupts one engine result so the suite must report a failure.
  bool inject_fault = false;
};

// reach and enumerate_reachable_sets versus node-level path enumeration on
// random graphs (|V| <= 200, |E| <= 2000, |R| <= 10), every sequence of
// length <= 3. Default 200 graphs.
SuiteResult coalesce_suite(const SuiteOptions& options);

// Beam search with beam width (|R|+1)^max_steps versus exhaustive scoring on
// graphs with |R| <= 3 and max_steps <= 3. Sequences and nll (1e-9) must
// match. Default 200 instances.
SuiteResult beam_suite(const SuiteOptions& options);

// Evaluated denotation contained in the union of reach over the cover
// sequences, with at most n_or + 1 sequences. Default 1000 pairs.
SuiteResult prop1_suite(const SuiteOptions& options);

// weak_labels versus exhaustive smallest-superset enumeration. Default 100.
SuiteResult weak_label_suite(const SuiteOptions& options);

}  // namespace kgseek::oracle
