// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/rma.hpp"

#include <string>

#include "executor.hpp"
#include "pgas/copy.hpp"
#include "transfer.hpp"

namespace pgas {

namespace detail {

namespace {

std::uint16_t send_with_slot(Context& ctx, RingMessage& m, bool nbi) {
  PeState& st = ctx.state();
  m.src_pe = static_cast<std::uint16_t>(st.pe);
  m.flags |= msg_flag::completion;
  if (nbi) m.flags |= msg_flag::nbi;
  m.completion_index = st.pool.alloc(m.op, nbi);
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

}  // namespace

std::uint64_t submit(Context& ctx, RingMessage m, bool nbi) {
  const std::uint16_t slot = send_with_slot(ctx, m, nbi);
  if (nbi) return 0;
  return ctx.state().pool.wait(slot);
}

std::uint16_t post(Context& ctx, RingMessage m) { return send_with_slot(ctx, m, false); }

void check_range(std::uint64_t off, std::size_t n, std::size_t limit) {
  if (off > limit || n > limit - off)
    throw Error(ErrorCode::invalid_address, "symmetric range [" + std::to_string(off) + ", +" +
                                                std::to_string(n) + ") is outside the heap");
}

std::byte* direct_addr(Context& ctx, std::uint64_t off, PeId pe) {
  auto r = ctx.translate(ctx.heap_base() + off, pe);
  return r ? static_cast<std::byte*>(*r) : nullptr;
}

}  // namespace detail

namespace {

using detail::now;
using detail::pace_direct;

void check_pe(const Context& ctx, PeId pe) {
  if (pe < 0 || pe >= ctx.n_pes())
    throw Error(ErrorCode::invalid_argument, "PE " + std::to_string(pe) + " out of range");
}

void check_user(const Context& ctx, SymmetricOffset off, std::size_t n, PeId pe) {
  check_pe(ctx, pe);
  detail::check_range(off.value, n, ctx.heap_size());
}

RingMessage message(std::uint8_t op, PeId pe, SymmetricOffset off, const void* local,
                    std::uint64_t count) {
  RingMessage m;
  m.op = op;
  m.dst_pe = static_cast<std::uint16_t>(pe);
  m.addr_a = off.value;
  m.addr_b = reinterpret_cast<std::uintptr_t>(local);
  if (local) m.flags |= msg_flag::local_token;
  m.count = count;
  return m;
}

void ring_target(Context& ctx, PeId pe) {
  detail::Node& node = ctx.node();
  if (node.is_local(pe)) node.ring_doorbell(node.local_state(pe));
}

void do_put(Context& ctx, SymmetricOffset dest, const void* src, std::size_t n, PeId pe,
            bool nbi) {
  check_user(ctx, dest, n, pe);
  if (n == 0) return;
  std::byte* dst = detail::direct_addr(ctx, dest.value, pe);
  if (dst && ctx.cutover().choose(OpKind::rma, n, 1, ctx.n_pes()) == Path::direct) {
    auto start = now();
    race_copy(dst, src, n);
    ring_target(ctx, pe);
    pace_direct(start, ctx.cost_model().direct_seconds(n, 1, ctx.my_pe(), pe));
    return;
  }
  RingMessage m = message(opcode::put, pe, dest, src, n);
  if (dst) m.flags |= msg_flag::engine;
  detail::submit(ctx, m, nbi);
}

void do_get(Context& ctx, void* dest, SymmetricOffset src, std::size_t n, PeId pe, bool nbi) {
  check_user(ctx, src, n, pe);
  if (n == 0) return;
  const std::byte* from = detail::direct_addr(ctx, src.value, pe);
  if (from && ctx.cutover().choose(OpKind::rma, n, 1, ctx.n_pes()) == Path::direct) {
    auto start = now();
    race_copy(dest, from, n);
    ctx.node().ring_doorbell_for(dest);
    pace_direct(start, ctx.cost_model().direct_seconds(n, 1, pe, ctx.my_pe()));
    return;
  }
  RingMessage m = message(opcode::get, pe, src, dest, n);
  if (from) m.flags |= msg_flag::engine;
  detail::submit(ctx, m, nbi);
}

}  // namespace

void put(Context& ctx, SymmetricOffset dest, const void* src, std::size_t nbytes, PeId pe) {
  do_put(ctx, dest, src, nbytes, pe, false);
}

void get(Context& ctx, void* dest, SymmetricOffset src, std::size_t nbytes, PeId pe) {
  do_get(ctx, dest, src, nbytes, pe, false);
}

void put_nbi(Context& ctx, SymmetricOffset dest, const void* src, std::size_t nbytes, PeId pe) {
  do_put(ctx, dest, src, nbytes, pe, true);
}

void get_nbi(Context& ctx, void* dest, SymmetricOffset src, std::size_t nbytes, PeId pe) {
  do_get(ctx, dest, src, nbytes, pe, true);
}

void p_bits(Context& ctx, SymmetricOffset dest, std::uint64_t bits, ElementType type, PeId pe) {
  if (!is_valid(type)) throw Error(ErrorCode::unsupported, "bad element type");
  const std::size_t w = width(type);
  check_user(ctx, dest, w, pe);
  if (dest.value % w) throw Error(ErrorCode::misaligned, "scalar store must be aligned");
  if (std::byte* addr = detail::direct_addr(ctx, dest.value, pe)) {
    switch (w) {
      case 1: race_store(addr, static_cast<std::uint8_t>(bits)); break;
      case 2: race_store(addr, static_cast<std::uint16_t>(bits)); break;
      case 4: race_store(addr, static_cast<std::uint32_t>(bits)); break;
      default: race_store(addr, bits); break;
    }
    ring_target(ctx, pe);
    return;
  }
  RingMessage m = message(opcode::p, pe, dest, nullptr, 1);
  m.dtype = static_cast<std::uint8_t>(type);
  m.imm1 = bits;
  detail::submit(ctx, m, false);
}

std::uint64_t g_bits(Context& ctx, SymmetricOffset src, ElementType type, PeId pe) {
  if (!is_valid(type)) throw Error(ErrorCode::unsupported, "bad element type");
  const std::size_t w = width(type);
  check_user(ctx, src, w, pe);
  if (src.value % w) throw Error(ErrorCode::misaligned, "scalar load must be aligned");
  if (const std::byte* addr = detail::direct_addr(ctx, src.value, pe)) {
    switch (w) {
      case 1: return race_load<std::uint8_t>(addr);
      case 2: return race_load<std::uint16_t>(addr);
      case 4: return race_load<std::uint32_t>(addr);
      default: return race_load<std::uint64_t>(addr);
    }
  }
  RingMessage m = message(opcode::g, pe, src, nullptr, 1);
  m.dtype = static_cast<std::uint8_t>(type);
  return detail::submit(ctx, m, false);
}

void iput(Context& ctx, SymmetricOffset dest, const void* src, std::size_t dst_stride,
          std::size_t src_stride, std::size_t nelems, ElementType type, PeId pe) {
  if (!is_valid(type)) throw Error(ErrorCode::unsupported, "bad element type");
  if (dst_stride == 0 || src_stride == 0)
    throw Error(ErrorCode::invalid_argument, "strides must be >= 1");
  const std::size_t w = width(type);
  check_user(ctx, dest, detail::strided_extent(nelems, w, dst_stride), pe);
  if (nelems == 0) return;
  if (std::byte* dst = detail::direct_addr(ctx, dest.value, pe)) {
    auto start = now();
    race_copy_strided(dst, src, nelems, w, dst_stride, src_stride);
    ring_target(ctx, pe);
    pace_direct(start, ctx.cost_model().direct_seconds(nelems * w, 1, ctx.my_pe(), pe));
    return;
  }
  RingMessage m = message(opcode::iput, pe, dest, src, nelems);
  m.dtype = static_cast<std::uint8_t>(type);
  m.stride = dst_stride;
  m.imm2 = src_stride;
  detail::submit(ctx, m, false);
}

void iget(Context& ctx, void* dest, SymmetricOffset src, std::size_t dst_stride,
          std::size_t src_stride, std::size_t nelems, ElementType type, PeId pe) {
  if (!is_valid(type)) throw Error(ErrorCode::unsupported, "bad element type");
  if (dst_stride == 0 || src_stride == 0)
    throw Error(ErrorCode::invalid_argument, "strides must be >= 1");
  const std::size_t w = width(type);
  check_user(ctx, src, detail::strided_extent(nelems, w, src_stride), pe);
  if (nelems == 0) return;
  if (const std::byte* from = detail::direct_addr(ctx, src.value, pe)) {
    auto start = now();
    race_copy_strided(dest, from, nelems, w, dst_stride, src_stride);
    ctx.node().ring_doorbell_for(dest);
    pace_direct(start, ctx.cost_model().direct_seconds(nelems * w, 1, pe, ctx.my_pe()));
    return;
  }
  RingMessage m = message(opcode::iget, pe, src, dest, nelems);
  m.dtype = static_cast<std::uint8_t>(type);
  m.stride = src_stride;
  m.imm2 = dst_stride;
  detail::submit(ctx, m, false);
}

void put_signal(Context& ctx, SymmetricOffset dest, const void* src, std::size_t nbytes,
                SymmetricOffset sig, std::uint64_t signal, SignalOp op, PeId pe) {
  check_user(ctx, dest, nbytes, pe);
  detail::check_range(sig.value, 8, ctx.heap_size());
  if (sig.value % 8) throw Error(ErrorCode::misaligned, "signal must be 8-byte aligned");
  std::byte* dst = detail::direct_addr(ctx, dest.value, pe);
  if (dst && ctx.cutover().choose(OpKind::rma, nbytes, 1, ctx.n_pes()) == Path::direct) {
    auto start = now();
    if (nbytes) race_copy(dst, src, nbytes);
    pace_direct(start, ctx.cost_model().direct_seconds(nbytes, 1, ctx.my_pe(), pe));
    std::atomic_ref<std::uint64_t> s(
        *reinterpret_cast<std::uint64_t*>(detail::direct_addr(ctx, sig.value, pe)));
    if (op == SignalOp::set)
      s.store(signal, std::memory_order_release);
    else
      s.fetch_add(signal, std::memory_order_acq_rel);
    ring_target(ctx, pe);
    return;
  }
  RingMessage m = message(op == SignalOp::set ? opcode::put_signal_set : opcode::put_signal_add,
                          pe, dest, src, nbytes);
  if (dst) m.flags |= msg_flag::engine;
  m.imm1 = signal;
  m.imm2 = sig.value;
  detail::submit(ctx, m, false);
}

void wait_until(Context& ctx, SymmetricOffset addr, CmpOp cmp, std::uint64_t value) {
  detail::check_range(addr.value, 8, ctx.heap_size());
  if (addr.value % 8) throw Error(ErrorCode::misaligned, "wait_until needs an 8-byte word");
  const std::byte* p = ctx.heap_base() + addr.value;
  ctx.node().wait_for(ctx.state(), [&] {
    return compare(cmp, race_load<std::uint64_t>(p, std::memory_order_acquire), value);
  });
}

Path rma_path(const Context& ctx, std::size_t nbytes, int group_size, PeId pe) {
  if (!ctx.is_direct(pe)) return Path::engine;
  return ctx.cutover().choose(OpKind::rma, nbytes, group_size, ctx.n_pes());
}

namespace {

enum class Dir { put, get };

void rma_work_group(WorkGroup& wg, Dir dir, SymmetricOffset sym, void* local, std::size_t n,
                    PeId pe, bool nbi) {
  Context& ctx = wg.context();
  wg.check_arguments(hash_args({static_cast<std::uint64_t>(dir), sym.value,
                                reinterpret_cast<std::uintptr_t>(local), n,
                                static_cast<std::uint64_t>(pe), nbi}));
  check_user(ctx, sym, n, pe);
  if (n == 0) return;
  const int G = wg.size();
  std::byte* remote = detail::direct_addr(ctx, sym.value, pe);
  if (remote && ctx.cutover().choose(OpKind::rma, n, G, ctx.n_pes()) == Path::direct) {
    std::exception_ptr err;
    try {
      auto start = now();
      Range r = wg.my_block(n);
      auto* mine = static_cast<std::byte*>(local);
      if (r.size()) {
        if (dir == Dir::put) {
          race_copy(remote + r.begin, mine + r.begin, r.size());
          ring_target(ctx, pe);
        } else {
          race_copy(mine + r.begin, remote + r.begin, r.size());
          ctx.node().ring_doorbell_for(mine);
        }
      }
      pace_direct(start, ctx.cost_model().direct_seconds(n, G, ctx.my_pe(), pe));
    } catch (...) {
      err = std::current_exception();
    }
    if (nbi) {
      if (err) std::rethrow_exception(err);
      return;
    }
    wg.barrier_with(err);
    return;
  }
  wg.leader_then_barrier([&] {
    RingMessage m = message(dir == Dir::put ? opcode::put : opcode::get, pe, sym, local, n);
    if (remote) m.flags |= msg_flag::engine;
    detail::submit(ctx, m, nbi);
  });
}

}  // namespace

void put_work_group(WorkGroup& wg, SymmetricOffset dest, const void* src, std::size_t nbytes,
                    PeId pe) {
  rma_work_group(wg, Dir::put, dest, const_cast<void*>(src), nbytes, pe, false);
}

void get_work_group(WorkGroup& wg, void* dest, SymmetricOffset src, std::size_t nbytes, PeId pe) {
  rma_work_group(wg, Dir::get, src, dest, nbytes, pe, false);
}

void put_nbi_work_group(WorkGroup& wg, SymmetricOffset dest, const void* src,
                        std::size_t nbytes, PeId pe) {
  rma_work_group(wg, Dir::put, dest, const_cast<void*>(src), nbytes, pe, true);
}

void get_nbi_work_group(WorkGroup& wg, void* dest, SymmetricOffset src, std::size_t nbytes,
                        PeId pe) {
  rma_work_group(wg, Dir::get, src, dest, nbytes, pe, true);
}

}  // namespace pgas
