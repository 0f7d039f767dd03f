// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <thread>

#include "pgas/amo.hpp"
#include "pgas/completion.hpp"
#include "pgas/ring.hpp"
#include "pgas/runtime.hpp"
#include "pgas/testing.hpp"

namespace pgas {
namespace {

TEST(CompletionPool, FreshPoolStartsAtZero) {
  CompletionPool pool;
  EXPECT_EQ(pool.alloc(0, false), 0);
  EXPECT_EQ(pool.alloc(0, false), 1);
  EXPECT_EQ(pool.status(0), SlotStatus::pending);
}

TEST(CompletionPool, FreedIndexIsReused) {
  CompletionPool pool;
  for (std::size_t i = 0; i < CompletionPool::kSlots; ++i) pool.alloc(0, false);
  EXPECT_FALSE(pool.try_alloc(0, false));
  pool.complete(137, 5);
  EXPECT_EQ(pool.wait(137), 5u);
  EXPECT_EQ(pool.status(137), SlotStatus::empty);
  EXPECT_EQ(pool.alloc(0, false), 137);
}

TEST(CompletionPool, ConcurrentAllocsAreDistinct) {
  CompletionPool pool;
  std::vector<std::uint16_t> a, b;
  std::thread t1([&] {
    for (int i = 0; i < 100; ++i) a.push_back(pool.alloc(0, false));
  });
  std::thread t2([&] {
    for (int i = 0; i < 100; ++i) b.push_back(pool.alloc(0, false));
  });
  t1.join();
  t2.join();
  std::set<std::uint16_t> all(a.begin(), a.end());
  all.insert(b.begin(), b.end());
  EXPECT_EQ(all.size(), 200u);
}

TEST(CompletionPool, ErrorStatusSurfaces) {
  CompletionPool pool;
  auto i = pool.alloc(opcode::get, false);
  pool.fail(i, ErrorCode::invalid_address);
  try {
    pool.wait(i);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::remote_failure);
    EXPECT_NE(std::string(e.what()).find("get"), std::string::npos);
  }
  EXPECT_EQ(pool.status(i), SlotStatus::empty);
}

TEST(CompletionPool, ReverseOrderCompletion) {
  CompletionPool pool;
  std::vector<std::uint16_t> idx;
  for (int i = 0; i < 64; ++i) idx.push_back(pool.alloc(0, false));
  for (int i = 63; i >= 0; --i) pool.complete(idx[static_cast<std::size_t>(i)], 1000u + static_cast<unsigned>(i));
  for (int i = 0; i < 64; ++i) EXPECT_EQ(pool.wait(idx[static_cast<std::size_t>(i)]), 1000u + static_cast<unsigned>(i));
}

TEST(CompletionPool, ExhaustedAllocReapsNonBlocking) {
  CompletionPool pool;
  for (std::size_t i = 0; i < CompletionPool::kSlots; ++i) pool.alloc(opcode::put, true);
  std::thread completer([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    pool.complete(0, 0);
  });
  EXPECT_EQ(pool.alloc(opcode::get, false), 0);
  completer.join();
  EXPECT_EQ(pool.outstanding_nbi(), CompletionPool::kSlots - 1);
}

TEST(CompletionPool, QuietRaisesDeferredError) {
  CompletionPool pool;
  auto a = pool.alloc(opcode::put, true);
  auto b = pool.alloc(opcode::put, true);
  pool.complete(a, 0);
  pool.fail(b, ErrorCode::link_failure);
  EXPECT_THROW(pool.quiet(), Error);
  EXPECT_EQ(pool.outstanding(), 0u);
  EXPECT_NO_THROW(pool.quiet());
}

TEST(Completion, FetchAddPayloadThroughProxy) {
  RuntimeConfig cfg;
  cfg.npes = 1;
  Runtime rt(cfg);
  rt.run([](Context& ctx) {
    auto off = ctx.symm_alloc(8);
    *ctx.local<std::uint64_t>(off) = 7;
    auto slot = testing::send_nop(ctx, 7);
    EXPECT_EQ(testing::wait_slot(ctx, slot), 7u);
    EXPECT_EQ(atomic_fetch_add<std::uint64_t>(ctx, off, 5, 0), 7u);
    EXPECT_EQ(*ctx.local<std::uint64_t>(off), 12u);
  });
  rt.finalize();
}

TEST(Completion, ReorderedProxyDeliversOwnPayloads) {
  RuntimeConfig cfg;
  cfg.npes = 4;
  Runtime rt(cfg);
  testing::set_proxy_reorder(rt, 16, 1234);
  std::atomic<int> wrong{0};
  rt.run([&](Context& ctx) {
    std::mt19937 rng(static_cast<unsigned>(ctx.my_pe()));
    for (int round = 0; round < 20; ++round) {
      std::vector<std::pair<std::uint16_t, std::uint64_t>> live;
      for (int i = 0; i < 8; ++i) {
        std::uint64_t payload = (std::uint64_t(ctx.my_pe()) << 32) | std::uint64_t(round * 8 + i);
        live.emplace_back(testing::send_nop(ctx, payload), payload);
      }
      std::shuffle(live.begin(), live.end(), rng);
      for (auto& [slot, payload] : live)
        if (testing::wait_slot(ctx, slot) != payload) ++wrong;
    }
  });
  testing::set_proxy_reorder(rt, 0, 0);
  EXPECT_EQ(wrong.load(), 0);
  rt.finalize();
}

}  // namespace
}  // namespace pgas
