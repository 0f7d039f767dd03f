// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstring>

#include "pgas/runtime.hpp"
#include "program.hpp"

namespace pgas::testsupport {
namespace {

TEST(Program, DeterministicGeneration) {
  auto a = generate_program(5, 4, 200);
  auto b = generate_program(5, 4, 200);
  EXPECT_EQ(a.op_count(), 200u);
  EXPECT_EQ(simulate(a), simulate(b));
  EXPECT_NE(simulate(a), simulate(generate_program(6, 4, 200)));
}

TEST(Program, ReferenceSemantics) {
  Program prog;
  prog.npes = 2;
  prog.layout.data_bytes = 64;
  prog.layout.amo_words = 2;
  prog.layout.result_slots = 2;
  Op put;
  put.code = OpCode::put;
  put.issuer = 0;
  put.target = 1;
  put.local = 0;
  put.remote = 8;
  put.nbytes = 4;
  Op amo;
  amo.code = OpCode::amo;
  amo.issuer = 1;
  amo.target = 0;
  amo.type = ElementType::u64;
  amo.amo = AmoOp::fetch_add;
  amo.remote = prog.layout.amo_base();
  amo.value = 5;
  amo.result = prog.layout.result_base();
  prog.epochs = {{put, amo}};
  auto init = initial_areas(prog);
  auto out = simulate(prog);
  EXPECT_TRUE(std::equal(init[0].begin(), init[0].begin() + 4, out[1].begin() + 8));
  std::uint64_t before, after, fetched;
  std::memcpy(&before, init[0].data() + amo.remote, 8);
  std::memcpy(&after, out[0].data() + amo.remote, 8);
  std::memcpy(&fetched, out[1].data() + amo.result, 8);
  EXPECT_EQ(after, before + 5);
  EXPECT_EQ(fetched, before);
}

TEST(Program, RuntimeMatchesReference) {
  RuntimeConfig cfg;
  cfg.npes = 4;
  cfg.heap_size = 1 << 20;
  auto prog = generate_program(1, 4, 400);
  Runtime rt(cfg);
  auto got = run_program(rt, prog);
  EXPECT_EQ(first_difference(got, simulate(prog)), "");
  rt.finalize();
}

TEST(Program, EveryModeMatchesReference) {
  for (CutoverMode mode : {CutoverMode::never, CutoverMode::always}) {
    RuntimeConfig cfg;
    cfg.npes = 3;
    cfg.heap_size = 1 << 20;
    cfg.cutover_mode = mode;
    auto prog = generate_program(2, 3, 300);
    Runtime rt(cfg);
    auto got = run_program(rt, prog);
    EXPECT_EQ(first_difference(got, simulate(prog)), "") << to_string(mode);
    rt.finalize();
  }
}

}  // namespace
}  // namespace pgas::testsupport
