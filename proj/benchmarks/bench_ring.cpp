// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <thread>

#include "pgas/ring.hpp"

namespace {

void BM_RingSendConsume(benchmark::State& state) {
  pgas::Ring ring(4096, 64);
  pgas::RingMessage m;
  m.op = pgas::opcode::nop;
  for (auto _ : state) {
    ring.send(m);
    benchmark::DoNotOptimize(ring.try_consume());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RingSendConsume);

// Producers on their own threads, consumer on the benchmark thread.
void BM_RingMpsc(benchmark::State& state) {
  const int producers = static_cast<int>(state.range(0));
  constexpr std::uint64_t kEach = 1 << 15;
  for (auto _ : state) {
    pgas::Ring ring(4096, 64);
    std::vector<std::thread> ts;
    for (int p = 0; p < producers; ++p)
      ts.emplace_back([&ring] {
        pgas::RingMessage m;
        for (std::uint64_t i = 0; i < kEach; ++i) {
          m.imm1 = i;
          ring.send(m);
        }
      });
    for (std::uint64_t got = 0; got < kEach * producers; ++got)
      benchmark::DoNotOptimize(ring.consume_wait());
    for (auto& t : ts) t.join();
  }
  state.SetItemsProcessed(state.iterations() * kEach * producers);
}
BENCHMARK(BM_RingMpsc)->Arg(1)->Arg(4)->Arg(8)->UseRealTime();

void BM_EncodeDecode(benchmark::State& state) {
  pgas::RingMessage m;
  m.addr_a = 0x1234;
  m.imm1 = 42;
  for (auto _ : state) {
    auto bytes = pgas::encode(m);
    benchmark::DoNotOptimize(pgas::decode_message(bytes));
  }
}
BENCHMARK(BM_EncodeDecode);

}  // namespace
