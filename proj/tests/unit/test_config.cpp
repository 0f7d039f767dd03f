// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "pgas/config.hpp"
#include "pgas/error.hpp"
#include "pgas/types.hpp"

namespace pgas {
namespace {

TEST(Config, ParsesKeyValueText) {
  auto cfg = parse_config(R"(
# comment
npes = 4
heap_size = 2MiB
topology = paired
cutover_mode = never
time_scale = 2.5
engine_startup_us = 7
validate = on
)");
  EXPECT_EQ(cfg.npes, 4);
  EXPECT_EQ(cfg.heap_size, 2u << 20);
  EXPECT_EQ(cfg.topology, Topology::paired);
  EXPECT_EQ(cfg.cutover_mode, CutoverMode::never);
  EXPECT_DOUBLE_EQ(cfg.time_scale, 2.5);
  ASSERT_TRUE(cfg.engine_startup_us);
  EXPECT_DOUBLE_EQ(*cfg.engine_startup_us, 7);
  EXPECT_TRUE(cfg.validate);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("npes = x"), Error);
  EXPECT_THROW(parse_config("bogus = 1"), Error);
  EXPECT_THROW(parse_config("topology = moon"), Error);
  EXPECT_THROW(parse_config("no equals sign"), Error);
}

TEST(Config, CheckEnforcesInvariants) {
  RuntimeConfig cfg;
  EXPECT_NO_THROW(cfg.check());
  cfg.npes = 0;
  EXPECT_THROW(cfg.check(), Error);
  cfg = {};
  cfg.ring_capacity = 100;
  EXPECT_THROW(cfg.check(), Error);
  cfg.ring_capacity = 1;
  EXPECT_THROW(cfg.check(), Error);
  cfg = {};
  cfg.internode_role = InternodeRole::node_a;
  EXPECT_THROW(cfg.check(), Error);
  cfg.peer_endpoint = "127.0.0.1:1234";
  EXPECT_NO_THROW(cfg.check());
  cfg = {};
  cfg.npes = 2;
  cfg.world_npes = 3;
  try {
    cfg.check();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_config);
  }
}

TEST(Config, TextRoundTrip) {
  RuntimeConfig cfg;
  cfg.npes = 6;
  cfg.heap_size = 3u << 20;
  cfg.topology = Topology::cross_tile;
  cfg.cutover_mode = CutoverMode::always;
  cfg.engine_bw_cap_gbps = 12.5;
  auto back = parse_config(to_text(cfg));
  EXPECT_EQ(back.npes, 6);
  EXPECT_EQ(back.heap_size, cfg.heap_size);
  EXPECT_EQ(back.topology, Topology::cross_tile);
  EXPECT_EQ(back.cutover_mode, CutoverMode::always);
  EXPECT_EQ(back.engine_bw_cap_gbps, 12.5);
}

TEST(Config, Sizes) {
  EXPECT_EQ(parse_size("4096"), 4096u);
  EXPECT_EQ(parse_size("4K"), 4096u);
  EXPECT_EQ(parse_size("16MiB"), 16u << 20);
  EXPECT_EQ(parse_size("1G"), 1u << 30);
  EXPECT_THROW(parse_size("12Q"), Error);
  EXPECT_THROW(parse_size(""), Error);
}

TEST(Config, FileAndEnvironment) {
  const std::string path = ::testing::TempDir() + "pgas_cfg_test.conf";
  {
    std::ofstream f(path);
    f << "npes = 3\nheap_size = 64K\n";
  }
  EXPECT_EQ(load_config_file(path).npes, 3);
  EXPECT_THROW(load_config_file(path + ".missing"), Error);
  ::setenv("PGAS_SIM_CONFIG", path.c_str(), 1);
  ::setenv("PGAS_SIM_VALIDATE", "1", 1);
  auto cfg = load_config_from_env();
  EXPECT_EQ(cfg.npes, 3);
  EXPECT_TRUE(cfg.validate);
  ::unsetenv("PGAS_SIM_CONFIG");
  ::unsetenv("PGAS_SIM_VALIDATE");
}

TEST(Types, NamesRoundTrip) {
  for (ElementType t : kAllElementTypes) EXPECT_EQ(parse_element_type(to_string(t)), t);
  for (auto m : {CutoverMode::never, CutoverMode::always, CutoverMode::tuned})
    EXPECT_EQ(parse_cutover_mode(to_string(m)), m);
  for (auto t : {Topology::same_tile, Topology::cross_tile, Topology::cross_device, Topology::paired})
    EXPECT_EQ(parse_topology(to_string(t)), t);
  EXPECT_FALSE(parse_topology("nope"));
}

TEST(Types, Widths) {
  EXPECT_EQ(width(ElementType::i8), 1u);
  EXPECT_EQ(width(ElementType::u16), 2u);
  EXPECT_EQ(width(ElementType::f32), 4u);
  EXPECT_EQ(width(ElementType::f64), 8u);
  EXPECT_TRUE(amo_supports(AmoOp::fetch_add, ElementType::i32));
  EXPECT_FALSE(amo_supports(AmoOp::fetch_add, ElementType::f64));
  EXPECT_TRUE(amo_supports(AmoOp::compare_swap, ElementType::f32));
  EXPECT_FALSE(amo_supports(AmoOp::add, ElementType::i16));
  EXPECT_FALSE(reduce_supports(ReduceOp::bit_xor, ElementType::f32));
}

}  // namespace
}  // namespace pgas
