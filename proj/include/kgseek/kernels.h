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

// Data-parallel inner loops. Every kernel has a portable scalar reference in
// namespace `scalar`; SIMD variants are selected once at startup based on
// CPUID and may be overridden with KGSEEK_SIMD=scalar|avx2 or set_isa().

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace kgseek::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// Highest ISA both compiled in and supported by this CPU.
Isa best_supported_isa();

// Currently active ISA.
Isa active_isa();

// Switches the dispatch table. Returns false (and changes nothing) when the
// requested ISA is unavailable.
bool set_isa(Isa isa);

// dst[i] |= src[i]
void bitset_or(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src);

// Number of set bits.
std::size_t bitset_popcount(std::span<const std::uint64_t> words);

// popcount(a & b) without materializing the intersection.
std::size_t bitset_and_popcount(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b);

double dot(std::span<const double> a, std::span<const double> b);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
void bitset_or(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
std::size_t bitset_popcount(const std::uint64_t* words, std::size_t n);
std::size_t bitset_and_popcount(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
void bitset_or(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
std::size_t bitset_popcount(const std::uint64_t* words, std::size_t n);
std::size_t bitset_and_popcount(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2

}  // namespace kgseek::kernels
