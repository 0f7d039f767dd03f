// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <cstring>
#include <vector>

#include "pgas/copy.hpp"

namespace {

void BM_RaceCopy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::byte> a(n), b(n);
  for (auto _ : state) {
    pgas::race_copy(b.data(), a.data(), n);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_RaceCopy)->RangeMultiplier(16)->Range(64, 16 << 20);

// Misaligned source forces the narrow-unit path.
void BM_RaceCopyMisaligned(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::byte> a(n + 1), b(n);
  for (auto _ : state) {
    pgas::race_copy(b.data(), a.data() + 1, n);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_RaceCopyMisaligned)->RangeMultiplier(16)->Range(64, 1 << 20);

void BM_Memcpy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::byte> a(n), b(n);
  for (auto _ : state) {
    std::memcpy(b.data(), a.data(), n);
    benchmark::ClobberMemory();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Memcpy)->RangeMultiplier(16)->Range(64, 16 << 20);

}  // namespace
