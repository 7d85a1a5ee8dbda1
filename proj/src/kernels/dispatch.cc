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

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

#include "kgseek/kernels.h"

namespace kgseek::kernels {
namespace {

struct Table {
  Isa isa;
  void (*bitset_or)(std::uint64_t*, const std::uint64_t*, std::size_t);
  std::size_t (*bitset_popcount)(const std::uint64_t*, std::size_t);
  std::size_t (*bitset_and_popcount)(const std::uint64_t*, const std::uint64_t*,
                                     std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr Table kScalarTable = {Isa::kScalar,        scalar::bitset_or,
                                scalar::bitset_popcount, scalar::bitset_and_popcount,
                                scalar::dot,         scalar::axpy};

#if defined(KGSEEK_HAVE_AVX2)
constexpr Table kAvx2Table = {Isa::kAvx2,         avx2::bitset_or,
                              avx2::bitset_popcount, avx2::bitset_and_popcount,
                              avx2::dot,          avx2::axpy};
#endif

bool cpu_has_avx2() {
#if defined(KGSEEK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
         __builtin_cpu_supports("popcnt");
#else
  return false;
#endif
}

const Table* table_for(Isa isa) {
#if defined(KGSEEK_HAVE_AVX2)
  if (isa == Isa::kAvx2 && cpu_has_avx2()) return &kAvx2Table;
#endif
  if (isa == Isa::kScalar) return &kScalarTable;
  return nullptr;
}

const Table* initial_table() {
  const Table* best = table_for(best_supported_isa());
  if (const char* env = std::getenv("KGSEEK_SIMD")) {
    std::string value(env);
    if (value == "scalar") return &kScalarTable;
    if (value == "avx2") {
      if (const Table* t = table_for(Isa::kAvx2)) return t;
    }
  }
  return best;
}

std::atomic<const Table*>& active() {
  static std::atomic<const Table*> table{initial_table()};
  return table;
}

inline const Table& current() { return *active().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa best_supported_isa() { return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar; }

Isa active_isa() { return current().isa; }

bool set_isa(Isa isa) {
  const Table* t = table_for(isa);
  if (t == nullptr) return false;
  active().store(t, std::memory_order_relaxed);
  return true;
}

void bitset_or(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  current().bitset_or(dst.data(), src.data(), std::min(dst.size(), src.size()));
}

std::size_t bitset_popcount(std::span<const std::uint64_t> words) {
  return current().bitset_popcount(words.data(), words.size());
}

std::size_t bitset_and_popcount(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b) {
  return current().bitset_and_popcount(a.data(), b.data(), std::min(a.size(), b.size()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  return current().dot(a.data(), b.data(), std::min(a.size(), b.size()));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  current().axpy(alpha, x.data(), y.data(), std::min(x.size(), y.size()));
}

}  // namespace kgseek::kernels
