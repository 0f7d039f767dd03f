// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/testing.hpp"

#include "node.hpp"
#include "proxy.hpp"

namespace pgas::testing {

std::uint16_t send_nop(Context& ctx, std::uint64_t payload) {
  detail::PeState& st = ctx.state();
  RingMessage m;
  m.op = opcode::nop;
  m.flags = msg_flag::completion;
  m.src_pe = static_cast<std::uint16_t>(st.pe);
  m.dst_pe = static_cast<std::uint16_t>(st.pe);
  m.imm1 = payload;
  m.completion_index = st.pool.alloc(m.op, false);
  try {
    ctx.node().ring->send(m);
  } catch (const Error&) {
    st.pool.fail(m.completion_index, ErrorCode::send_after_shutdown);
    try {
      st.pool.wait(m.completion_index);
    } catch (const Error&) {
    }
    throw;
  }
  return m.completion_index;
}

std::uint64_t wait_slot(Context& ctx, std::uint16_t slot) { return ctx.state().pool.wait(slot); }

void set_proxy_reorder(Runtime& rt, std::size_t window, std::uint64_t seed) {
  rt.node().proxy->set_reorder(window, seed);
}

std::uint64_t proxy_reordered(Runtime& rt) { return rt.node().proxy->reordered(); }

}  // namespace pgas::testing
