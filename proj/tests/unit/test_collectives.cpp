// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <cstring>
#include <mutex>
#include <random>
#include <vector>

#include "pgas/amo.hpp"
#include "pgas/collectives.hpp"
#include "pgas/rma.hpp"
#include "pgas/runtime.hpp"
#include "node.hpp"

namespace pgas {
namespace {

Runtime make(int npes, CutoverMode mode = CutoverMode::tuned) {
  RuntimeConfig cfg;
  cfg.npes = npes;
  cfg.heap_size = 4 << 20;
  cfg.cutover_mode = mode;
  return Runtime(cfg);
}

TEST(Teams, SplitStrided) {
  auto rt = make(12);
  rt.run([](Context& ctx) {
    const Team& world = ctx.team_world();
    EXPECT_EQ(world.size(), 12);
    EXPECT_EQ(world.my_rank(), ctx.my_pe());
    Team even = team_split_strided(ctx, world, 0, 2, 6);
    if (ctx.my_pe() % 2 == 0) {
      ASSERT_FALSE(even.is_null());
      EXPECT_EQ(even.members(), (std::vector<PeId>{0, 2, 4, 6, 8, 10}));
      EXPECT_EQ(even.my_rank(), ctx.my_pe() / 2);
    } else {
      EXPECT_TRUE(even.is_null());
    }
    Team copy = team_split_strided(ctx, world, 0, 1, 12);
    EXPECT_EQ(copy.members(), world.members());
    EXPECT_NE(copy.id(), world.id());
    // Nested: evens, then every third of those -> PEs 2 and 8.
    Team nested;
    if (even) nested = team_split_strided(ctx, even, 1, 3, 2);
    if (ctx.my_pe() == 2 || ctx.my_pe() == 8) {
      ASSERT_FALSE(nested.is_null());
      EXPECT_EQ(nested.members(), (std::vector<PeId>{2, 8}));
      team_sync(ctx, nested);
    } else {
      EXPECT_TRUE(nested.is_null());
    }
    EXPECT_THROW(team_split_strided(ctx, world, 0, 5, 4), Error);
  });
  rt.finalize();
}

TEST(Teams, ExhaustiveSmallSplits) {
  auto rt = make(6);
  rt.run([](Context& ctx) {
    for (int start = 0; start < 6; ++start)
      for (int stride = 1; stride <= 3; ++stride)
        for (int size = 1; start + (size - 1) * stride < 6; ++size) {
          Team t = team_split_strided(ctx, ctx.team_world(), start, stride, size);
          int k = ctx.my_pe() - start;
          bool member = k >= 0 && k % stride == 0 && k / stride < size;
          ASSERT_EQ(!t.is_null(), member);
          if (member) {
            EXPECT_EQ(t.my_rank(), k / stride);
            EXPECT_EQ(t.pe_of(size - 1), start + (size - 1) * stride);
            team_sync(ctx, t);
          }
        }
  });
  rt.finalize();
}

TEST(Teams, SingletonSyncReturns) {
  auto rt = make(3);
  rt.run([](Context& ctx) {
    Team me = team_split_strided(ctx, ctx.team_world(), ctx.my_pe() == 0 ? 0 : 0, 1, 1);
    if (me) team_sync(ctx, me);
  });
  rt.finalize();
}

TEST(Sync, BarrierPublishesNbiPuts) {
  auto rt = make(4);
  rt.run([](Context& ctx) {
    auto buf = ctx.symm_alloc(4 * 8192);
    std::vector<std::byte> mine(8192, static_cast<std::byte>(ctx.my_pe() + 1));
    for (PeId t = 0; t < 4; ++t)
      put_nbi(ctx, SymmetricOffset{buf.value + static_cast<std::uint64_t>(ctx.my_pe()) * 8192}, mine.data(), 8192, t);
    barrier_all(ctx);
    for (int s = 0; s < 4; ++s)
      for (int i = 0; i < 8192; ++i)
        ASSERT_EQ(ctx.local(buf)[s * 8192 + i], static_cast<std::byte>(s + 1));
  });
  rt.finalize();
}

TEST(Sync, DisjointTeamsIndependent) {
  auto rt = make(8);
  rt.run([](Context& ctx) {
    Team lo = team_split_strided(ctx, ctx.team_world(), 0, 1, 4);
    Team hi = team_split_strided(ctx, ctx.team_world(), 4, 1, 4);
    const Team& mine = lo ? lo : hi;
    auto c = ctx.symm_alloc(8);
    for (int i = 0; i < 500; ++i) {
      atomic_inc<std::uint64_t>(ctx, c, mine.pe_of(0));
      barrier(ctx, mine);
      if (mine.my_rank() == 0) EXPECT_EQ(*ctx.local<std::uint64_t>(c), std::uint64_t(4 * (i + 1)));
      barrier(ctx, mine);
    }
  });
  rt.finalize();
}

TEST(Collectives, BroadcastDefinition) {
  for (CutoverMode mode : {CutoverMode::never, CutoverMode::always}) {
    auto rt = make(4, mode);
    rt.run([](Context& ctx) {
      auto src = ctx.symm_alloc(64);
      auto dst = ctx.symm_alloc(64);
      if (ctx.my_pe() == 2) {
        auto* s = ctx.local<std::int32_t>(src);
        s[0] = 7;
        s[1] = 8;
        s[2] = 9;
      }
      broadcast(ctx, ctx.team_world(), dst, src, 3, ElementType::i32, 2);
      auto* d = ctx.local<std::int32_t>(dst);
      EXPECT_EQ(d[0], 7);
      EXPECT_EQ(d[1], 8);
      EXPECT_EQ(d[2], 9);
      broadcast(ctx, ctx.team_world(), dst, src, 0, ElementType::i32, 0);
      EXPECT_THROW(broadcast(ctx, ctx.team_world(), dst, src, 1, ElementType::i32, 9), Error);
    });
    rt.finalize();
  }
}

TEST(Collectives, FcollectDefinition) {
  for (CutoverMode mode : {CutoverMode::never, CutoverMode::always}) {
    auto rt = make(3, mode);
    rt.run([](Context& ctx) {
      auto src = ctx.symm_alloc(16);
      auto dst = ctx.symm_alloc(64);
      auto* s = ctx.local<std::int64_t>(src);
      s[0] = s[1] = ctx.my_pe();
      fcollect(ctx, ctx.team_world(), dst, src, 2, ElementType::i64);
      auto* d = ctx.local<std::int64_t>(dst);
      EXPECT_EQ(std::vector<std::int64_t>(d, d + 6), (std::vector<std::int64_t>{0, 0, 1, 1, 2, 2}));
    });
    rt.finalize();
  }
}

TEST(Collectives, CollectDefinition) {
  auto rt = make(3);
  rt.run([](Context& ctx) {
    auto src = ctx.symm_alloc(16);
    auto dst = ctx.symm_alloc(64);
    auto* s = ctx.local<std::int32_t>(src);
    std::size_t n = 0;
    if (ctx.my_pe() == 0) {
      s[0] = 5;
      n = 1;
    } else if (ctx.my_pe() == 2) {
      s[0] = 6;
      s[1] = 7;
      n = 2;
    }
    collect(ctx, ctx.team_world(), dst, src, n, ElementType::i32);
    auto* d = ctx.local<std::int32_t>(dst);
    EXPECT_EQ(std::vector<std::int32_t>(d, d + 3), (std::vector<std::int32_t>{5, 6, 7}));
  });
  rt.finalize();
}

TEST(Collectives, ReduceDefinition) {
  auto rt = make(4);
  rt.run([](Context& ctx) {
    auto src = ctx.symm_alloc(8);
    auto dst = ctx.symm_alloc(8);
    *ctx.local<std::int32_t>(src) = ctx.my_pe() + 1;
    reduce(ctx, ctx.team_world(), dst, src, 1, ElementType::i32, ReduceOp::sum);
    EXPECT_EQ(*ctx.local<std::int32_t>(dst), 10);
    Team pair = team_split_strided(ctx, ctx.team_world(), 0, 1, 2);
    if (pair) {
      *ctx.local<std::uint8_t>(src) = ctx.my_pe() == 0 ? 0b1010 : 0b0110;
      reduce(ctx, pair, dst, src, 1, ElementType::u8, ReduceOp::bit_xor);
      EXPECT_EQ(*ctx.local<std::uint8_t>(dst), 0b1100);
    }
    EXPECT_THROW(reduce(ctx, ctx.team_world(), dst, src, 1, ElementType::f32, ReduceOp::bit_and),
                 Error);
  });
  rt.finalize();
}

TEST(Collectives, WorkGroupVariantsMatchPlain) {
  RuntimeConfig cfg;
  cfg.npes = 4;
  cfg.heap_size = 4 << 20;
  cfg.work_group_lanes = 3;
  Runtime rt(cfg);
  rt.run([](Context& ctx) {
    const std::size_t n = 3000;
    auto src = ctx.symm_alloc(n * 8);
    auto a = ctx.symm_alloc(4 * n * 8);
    auto b = ctx.symm_alloc(4 * n * 8);
    auto* s = ctx.local<std::int64_t>(src);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::int64_t(i * 31 + static_cast<std::size_t>(ctx.my_pe()) * 1000003);
    const Team& w = ctx.team_world();
    fcollect(ctx, w, a, src, n, ElementType::i64);
    ctx.work_group(256, [&](WorkGroup& wg) { fcollect_work_group(wg, w, b, src, n, ElementType::i64); });
    EXPECT_EQ(std::memcmp(ctx.local(a), ctx.local(b), 4 * n * 8), 0);
    broadcast(ctx, w, a, src, n, ElementType::i64, 1);
    ctx.work_group(16, [&](WorkGroup& wg) { broadcast_work_group(wg, w, b, src, n, ElementType::i64, 1); });
    EXPECT_EQ(std::memcmp(ctx.local(a), ctx.local(b), n * 8), 0);
    reduce(ctx, w, a, src, n, ElementType::i64, ReduceOp::max);
    ctx.work_group(1024, [&](WorkGroup& wg) { reduce_work_group(wg, w, b, src, n, ElementType::i64, ReduceOp::max); });
    EXPECT_EQ(std::memcmp(ctx.local(a), ctx.local(b), n * 8), 0);
    collect(ctx, w, a, src, n - static_cast<std::size_t>(ctx.my_pe()), ElementType::i64);
    ctx.work_group(8, [&](WorkGroup& wg) {
      collect_work_group(wg, w, b, src, n - static_cast<std::size_t>(ctx.my_pe()), ElementType::i64);
    });
    EXPECT_EQ(std::memcmp(ctx.local(a), ctx.local(b), (4 * n - 6) * 8), 0);
    ctx.work_group(64, [&](WorkGroup& wg) {
      sync_all_work_group(wg);
      barrier_all_work_group(wg);
    });
  });
  rt.finalize();
}

TEST(Collectives, WorkGroupSyncBumpsOncePerPe) {
  RuntimeConfig cfg;
  cfg.npes = 3;
  cfg.work_group_lanes = 4;
  Runtime rt(cfg);
  std::mutex mu;
  std::vector<std::uint64_t> counters;
  rt.run([&](Context& ctx) {
    ctx.work_group(1024, [&](WorkGroup& wg) { sync_all_work_group(wg); });
    ctx.work_group(1, [&](WorkGroup& wg) { sync_all_work_group(wg); });
    sync_all(ctx);
    // Every PE bumped every counter exactly once per sync: 3 syncs x 3 PEs.
    auto psync = ctx.team_world().data().psync;
    std::uint64_t v = *ctx.local<std::uint64_t>(psync);
    std::lock_guard lk(mu);
    counters.push_back(v);
  });
  for (auto v : counters) EXPECT_EQ(v, 9u);
  rt.finalize();
}

}  // namespace
}  // namespace pgas
