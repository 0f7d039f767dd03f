// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "pgas/pgas.hpp"
#include "pgas/testing.hpp"

namespace {

pgas::RuntimeConfig unpaced(int npes) {
  pgas::RuntimeConfig cfg;
  cfg.npes = npes;
  cfg.heap_size = 4 << 20;
  cfg.engine_startup_us = 0;
  cfg.engine_bw_cap_gbps = 0;
  cfg.direct_throttle_ns = 0;
  return cfg;
}

void BM_Translate(benchmark::State& state) {
  pgas::Runtime rt(unpaced(2));
  rt.run([&](pgas::Context& ctx) {
    auto off = ctx.symm_alloc(64);
    if (ctx.my_pe() != 0) return;
    const void* p = ctx.local(off);
    for (auto _ : state) benchmark::DoNotOptimize(ctx.translate(p, 1));
  });
  rt.finalize();
}
BENCHMARK(BM_Translate);

void BM_DirectAmo(benchmark::State& state) {
  pgas::Runtime rt(unpaced(2));
  rt.run([&](pgas::Context& ctx) {
    auto off = ctx.symm_alloc(64);
    if (ctx.my_pe() != 0) return;
    for (auto _ : state)
      benchmark::DoNotOptimize(pgas::atomic_fetch_add<std::uint64_t>(ctx, off, 1, 1));
  });
  rt.finalize();
}
BENCHMARK(BM_DirectAmo);

// One request through the ring and back via the proxy.
void BM_ProxyRoundTrip(benchmark::State& state) {
  pgas::Runtime rt(unpaced(1));
  rt.run([&](pgas::Context& ctx) {
    for (auto _ : state)
      benchmark::DoNotOptimize(pgas::testing::wait_slot(ctx, pgas::testing::send_nop(ctx, 7)));
  });
  rt.finalize();
}
BENCHMARK(BM_ProxyRoundTrip)->UseRealTime();

void BM_DirectPut(benchmark::State& state) {
  auto cfg = unpaced(2);
  cfg.cutover_mode = pgas::CutoverMode::never;
  pgas::Runtime rt(cfg);
  const auto n = static_cast<std::size_t>(state.range(0));
  rt.run([&](pgas::Context& ctx) {
    auto dst = ctx.symm_alloc(n);
    auto src = ctx.symm_alloc(n);
    if (ctx.my_pe() != 0) return;
    for (auto _ : state) pgas::put(ctx, dst, ctx.local(src), n, 1);
  });
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n));
  rt.finalize();
}
BENCHMARK(BM_DirectPut)->RangeMultiplier(16)->Range(8, 1 << 20);

}  // namespace
