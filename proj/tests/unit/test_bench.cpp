// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "pgas/bench.hpp"
#include "pgas/error.hpp"

namespace pgas {
namespace {

// Clock that advances by `step` seconds for each iteration a batch runs.
struct FakeClock {
  double now = 0;
  double step;
  std::vector<std::uint64_t> batches;
  Clock clock() {
    return [this] { return now; };
  }
  std::function<void(std::uint64_t)> body() {
    return [this](std::uint64_t n) {
      batches.push_back(n);
      now += step * static_cast<double>(n);
    };
  }
};

TEST(Warmup, OneMillisecondPerCallStopsAtFour) {
  FakeClock fc{0, 1e-3, {}};
  EXPECT_EQ(warmup(fc.clock(), fc.body()), 4u);
  EXPECT_EQ(fc.batches, (std::vector<std::uint64_t>{1, 2, 4}));
}

TEST(Warmup, SlowBodyStopsAtOne) {
  FakeClock fc{0, 3e-3, {}};
  EXPECT_EQ(warmup(fc.clock(), fc.body()), 1u);
}

TEST(Warmup, ExactlyTwoMillisecondsIsNotEnough) {
  FakeClock fc{0, 1e-3, {}};
  fc.step = 2e-3;
  // 1 call = 2 ms does not exceed 2 ms; 2 calls = 4 ms does.
  EXPECT_EQ(warmup(fc.clock(), fc.body()), 2u);
}

TEST(Warmup, ZeroCostBodyHitsCap) {
  FakeClock fc{0, 0, {}};
  EXPECT_EQ(warmup(fc.clock(), fc.body()), kMaxIterations);
  EXPECT_EQ(fc.batches.back(), std::uint64_t{1} << 24);
}

TEST(Measure, TenTrialsBestIsMin) {
  double now = 0;
  int call = 0;
  std::vector<double> costs = {5, 3, 9, 2, 8, 7, 4, 6, 10, 11};
  auto clock = [&] { return now; };
  auto body = [&](std::uint64_t n) {
    // Warm-up batches cost 1 ms per iteration; trials cost costs[i] ms.
    if (call < 3)
      now += 1e-3 * static_cast<double>(n);
    else
      now += costs[static_cast<std::size_t>(call - 3)] * 1e-3;
    ++call;
  };
  Measurement m = measure(clock, body);
  EXPECT_EQ(m.iterations, 4u);
  ASSERT_EQ(m.trials.size(), 10u);
  EXPECT_EQ(kTrials, 10);
  EXPECT_NEAR(m.best_seconds, 2e-3, 1e-12);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(m.trials[i], costs[i] * 1e-3, 1e-12);
  EXPECT_THROW(measure(clock, body, 0), Error);
}

TEST(Measure, InterleavedRoundRobin) {
  double now = 0;
  auto clock = [&] { return now; };
  std::vector<char> log;
  // Series a costs 1 ms per iteration, b 3 ms.
  std::vector<std::function<void(std::uint64_t)>> batches = {
      [&](std::uint64_t n) { log.push_back('a'); now += 1e-3 * static_cast<double>(n); },
      [&](std::uint64_t n) { log.push_back('b'); now += 3e-3 * static_cast<double>(n); },
  };
  auto ms = measure_interleaved(clock, batches, 3);
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_EQ(ms[0].iterations, 4u);
  EXPECT_EQ(ms[1].iterations, 1u);
  EXPECT_EQ(std::string(log.begin(), log.end()), "aaab" "abbaab");
  EXPECT_NEAR(ms[0].best_seconds, 4e-3, 1e-12);
  EXPECT_NEAR(ms[1].best_seconds, 3e-3, 1e-12);
  EXPECT_EQ(ms[1].trials.size(), 3u);
}

TEST(Measure, InterleavedSharesNearbyCounts) {
  double now = 0;
  auto clock = [&] { return now; };
  // 0.6 ms stops at 4, 0.4 ms at 8, 5 ms at 1.
  std::vector<double> cost = {0.6e-3, 0.4e-3, 5e-3};
  std::vector<std::function<void(std::uint64_t)>> batches;
  for (double c : cost)
    batches.push_back([&, c](std::uint64_t n) { now += c * static_cast<double>(n); });
  auto ms = measure_interleaved(clock, batches, 2);
  EXPECT_EQ(ms[0].iterations, 8u);
  EXPECT_EQ(ms[1].iterations, 8u);
  EXPECT_EQ(ms[2].iterations, 1u);
  EXPECT_NEAR(ms[0].best_seconds, 4.8e-3, 1e-12);
  // Different share ids keep their own counts.
  ms = measure_interleaved(clock, batches, 2, {0, 1, 0});
  EXPECT_EQ(ms[0].iterations, 4u);
  EXPECT_EQ(ms[1].iterations, 8u);
}

TEST(Record, DerivedColumns) {
  Measurement m;
  m.iterations = 8;
  m.best_seconds = 2e-3;
  auto r = make_record("put", "same_tile", "tuned", 16, 2, 4096, 4096, m);
  EXPECT_DOUBLE_EQ(r.bandwidth, 4096.0 * 8 / 2e-3);
  EXPECT_DOUBLE_EQ(r.latency_us, 250.0);
  EXPECT_EQ(r.work_items, 16);
  EXPECT_EQ(r.iterations, 8u);
}

TEST(Csv, EmptyIsHeaderOnly) {
  EXPECT_EQ(to_csv({}), std::string(kCsvHeader) + "\n");
  EXPECT_TRUE(parse_csv(to_csv({})).empty());
}

TEST(Csv, RoundTripExact) {
  std::vector<BenchRecord> rs;
  for (int i = 0; i < 1000; ++i) {
    BenchRecord r;
    r.op = i % 2 ? "put" : "fcollect";
    r.topology = "paired";
    r.mode = "never";
    r.work_items = 1 << (i % 11);
    r.npes = 2 + i % 11;
    r.size = 8u << (i % 20);
    r.iterations = 1u + static_cast<unsigned>(i);
    r.best_seconds = 1.0 / (3.0 + i);
    r.bandwidth = 1e9 / 7.0 * i;
    r.latency_us = 0.1 + i / 3.0;
    rs.push_back(r);
  }
  std::string text = to_csv(rs);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1001);
  EXPECT_EQ(parse_csv(text), rs);
}

TEST(Csv, RejectsBadInput) {
  EXPECT_THROW(parse_csv(""), Error);
  EXPECT_THROW(parse_csv("a,b\n"), Error);
  std::string h = std::string(kCsvHeader) + "\n";
  EXPECT_THROW(parse_csv(h + "put,same_tile,tuned,1,2,8,1,0.1,1\n"), Error);
  EXPECT_THROW(parse_csv(h + "put,same_tile,tuned,x,2,8,1,0.1,1,2\n"), Error);
  BenchRecord r;
  r.op = "a,b";
  EXPECT_THROW(to_csv({r}), Error);
}

TEST(Csv, WriteAndAppend) {
  const std::string path = ::testing::TempDir() + "pgas_bench_test.csv";
  std::remove(path.c_str());
  BenchRecord a;
  a.op = "put";
  BenchRecord b;
  b.op = "get";
  append_csv({a}, path);
  append_csv({b}, path);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(parse_csv(ss.str()), (std::vector<BenchRecord>{a, b}));
  write_csv({b}, path);
  std::ifstream g(path);
  std::stringstream s2;
  s2 << g.rdbuf();
  EXPECT_EQ(parse_csv(s2.str()), std::vector<BenchRecord>{b});
  EXPECT_THROW(write_csv({}, "/nonexistent-dir/x.csv"), Error);
}

TEST(Suite, Pow2Range) {
  EXPECT_EQ(pow2_range(8, 64), (std::vector<std::uint64_t>{8, 16, 32, 64}));
  EXPECT_EQ(pow2_range(1, 1), (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(pow2_range(8, 16u << 20).size(), 22u);
}

TEST(Suite, GeometryChecks) {
  SuiteOptions o;
  o.suite = "c3";
  o.base.npes = 4;
  EXPECT_EQ(suite_min_pes(o), 12);
  try {
    run_suite(o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::geometry_mismatch);
  }
  o.suite = "c1";
  o.base.npes = 1;
  EXPECT_THROW(run_suite(o), Error);
  o.suite = "c9";
  o.base.npes = 2;
  try {
    run_suite(o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_config);
  }
  o.suite = "c1";
  o.base.internode_role = InternodeRole::node_a;
  o.base.peer_endpoint = "127.0.0.1:1";
  try {
    run_suite(o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::geometry_mismatch);
  }
}

TEST(Suite, SmallC1Sweep) {
  SuiteOptions o;
  o.suite = "c1";
  o.base.npes = 2;
  o.base.time_scale = 1;
  o.topology = Topology::same_tile;
  o.sizes = pow2_range(8, 1 << 20);
  o.trials = 3;
  int callbacks = 0;
  o.on_record = [&](const BenchRecord&) { ++callbacks; };
  auto rs = run_suite(o);
  ASSERT_EQ(rs.size(), 2 * o.sizes.size());
  EXPECT_EQ(callbacks, static_cast<int>(rs.size()));
  for (auto& r : rs) {
    EXPECT_TRUE(r.op == "put" || r.op == "get");
    EXPECT_EQ(r.topology, "same_tile");
    EXPECT_EQ(r.mode, "tuned");
    EXPECT_EQ(r.npes, 2);
    EXPECT_GT(r.bandwidth, 0);
  }
  // Bandwidth grows with size overall.
  EXPECT_GT(rs[o.sizes.size() - 1].bandwidth, 10 * rs[0].bandwidth);
}

TEST(Suite, SmallC3Sweep) {
  SuiteOptions o;
  o.suite = "c3";
  o.base.npes = 4;
  o.base.time_scale = 1;
  o.npes = {2, 4};
  o.group_sizes = {16};
  o.sizes = {1, 1024};
  o.mode = CutoverMode::tuned;
  o.trials = 2;
  EXPECT_EQ(suite_min_pes(o), 4);
  auto rs = run_suite(o);
  // 2 team sizes x 1 group x 2 sizes for fcollect, same for broadcast.
  ASSERT_EQ(rs.size(), 8u);
  EXPECT_EQ(rs[0].op, "fcollect");
  EXPECT_EQ(rs[0].topology, "paired");
  EXPECT_EQ(rs.back().op, "broadcast");
  EXPECT_EQ(rs.back().work_items, 128);
}

}  // namespace
}  // namespace pgas
