// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <cstring>
#include <random>
#include <vector>

#include "pgas/copy.hpp"
#include "pgas/runtime.hpp"
#include "pgas/work_group.hpp"

namespace pgas {
namespace {

TEST(WorkGroup, BlockPartition) {
  EXPECT_EQ(item_block(1024, 4, 0), (Range{0, 256}));
  EXPECT_EQ(item_block(1024, 4, 1), (Range{256, 512}));
  EXPECT_EQ(item_block(1024, 4, 3), (Range{768, 1024}));
  std::vector<std::size_t> sizes;
  for (int i = 0; i < 4; ++i) sizes.push_back(item_block(10, 4, i).size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 3, 3, 1}));
  EXPECT_EQ(item_block(2, 4, 3).size(), 0u);
  EXPECT_EQ(items_block(1024, 4, 1, 3), (Range{256, 768}));
}

TEST(WorkGroup, BlocksCoverExactlyOnce) {
  for (std::size_t n : {0u, 1u, 7u, 1000u, 4096u})
    for (int g : {1, 3, 16, 1024}) {
      std::size_t next = 0;
      for (int i = 0; i < g; ++i) {
        Range r = item_block(n, g, i);
        if (r.size() == 0) continue;
        EXPECT_EQ(r.begin, next);
        next = r.end;
      }
      EXPECT_EQ(next, n);
    }
}

TEST(Copy, RaceCopyMatchesMemcpy) {
  std::mt19937 rng(3);
  for (std::size_t n : {0u, 1u, 7u, 8u, 63u, 4097u, 100000u}) {
    std::vector<std::byte> src(n + 16), a(n + 16), b(n + 16);
    for (auto& x : src) x = static_cast<std::byte>(rng());
    for (std::size_t off : {0u, 3u}) {
      if (off + n > src.size()) continue;
      race_copy(a.data() + off, src.data() + off, n);
      std::memcpy(b.data() + off, src.data() + off, n);
      EXPECT_EQ(a, b);
    }
  }
}

TEST(Copy, StridedMatchesLoop) {
  std::vector<std::uint32_t> src = {1, 2, 3, 4};
  std::vector<std::uint32_t> dst(2);
  race_copy_strided(dst.data(), src.data(), 2, 4, 1, 2);
  EXPECT_EQ(dst, (std::vector<std::uint32_t>{1, 3}));
}

TEST(WorkGroup, LanesRunAndBarrier) {
  RuntimeConfig cfg;
  cfg.work_group_lanes = 4;
  Runtime rt(cfg);
  rt.run([](Context& ctx) {
    std::atomic<int> entered{0};
    std::atomic<int> leaders{0};
    std::vector<int> covered(1024);
    ctx.work_group(1024, [&](WorkGroup& wg) {
      EXPECT_EQ(wg.lanes(), 4);
      ++entered;
      wg.barrier();
      EXPECT_EQ(entered.load(), 4);
      if (wg.leader()) ++leaders;
      for (int i = wg.first_item(); i < wg.end_item(); ++i) covered[static_cast<std::size_t>(i)]++;
      Range r = wg.my_block(4096);
      EXPECT_EQ(r, items_block(4096, 1024, wg.first_item(), wg.end_item()));
    });
    EXPECT_EQ(leaders.load(), 1);
    for (int c : covered) EXPECT_EQ(c, 1);
    // More lanes than items collapses to one lane per item.
    ctx.work_group(2, [&](WorkGroup& wg) { EXPECT_EQ(wg.lanes(), 2); });
  });
  rt.finalize();
}

TEST(WorkGroup, LeaderErrorReachesEveryLane) {
  RuntimeConfig cfg;
  cfg.work_group_lanes = 3;
  Runtime rt(cfg);
  rt.run([](Context& ctx) {
    std::atomic<int> caught{0};
    EXPECT_THROW(ctx.work_group(8,
                                [&](WorkGroup& wg) {
                                  try {
                                    wg.leader_then_barrier(
                                        [] { throw Error(ErrorCode::invalid_argument, "x"); });
                                  } catch (const Error&) {
                                    ++caught;
                                    throw;
                                  }
                                }),
                 Error);
    EXPECT_EQ(caught.load(), 3);
  });
  rt.finalize();
}

TEST(WorkGroup, ValidationCatchesMismatch) {
  RuntimeConfig cfg;
  cfg.work_group_lanes = 2;
  cfg.validate = true;
  Runtime rt(cfg);
  rt.run([](Context& ctx) {
    try {
      ctx.work_group(4, [&](WorkGroup& wg) { wg.check_arguments(hash_args({1, 2, std::uint64_t(wg.lane())})); });
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::collective_mismatch);
    }
  });
  rt.finalize();
}

}  // namespace
}  // namespace pgas
