// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/amo.hpp"

#include <atomic>
#include <string>

#include "executor.hpp"
#include "transfer.hpp"

namespace pgas {

namespace detail {

namespace {

template <class U>
std::uint64_t rmw_bits(U* p, AmoOp op, U operand, U cmp) {
  std::atomic_ref<U> a(*p);
  constexpr auto mo = std::memory_order_seq_cst;
  switch (op) {
    case AmoOp::fetch: return a.load(mo);
    case AmoOp::set: a.store(operand, mo); return 0;
    case AmoOp::swap: return a.exchange(operand, mo);
    case AmoOp::compare_swap: {
      U expected = cmp;
      a.compare_exchange_strong(expected, operand, mo);
      return expected;
    }
    default: break;
  }
  return 0;
}

template <class T>
std::uint64_t rmw_int(void* addr, AmoOp op, std::uint64_t operand_bits, std::uint64_t cmp_bits) {
  using U = std::make_unsigned_t<T>;
  U* p = static_cast<U*>(addr);
  const U operand = static_cast<U>(operand_bits);
  std::atomic_ref<U> a(*p);
  constexpr auto mo = std::memory_order_seq_cst;
  // Unsigned arithmetic gives the same two's-complement bits as signed.
  switch (op) {
    case AmoOp::inc: a.fetch_add(1, mo); return 0;
    case AmoOp::add: a.fetch_add(operand, mo); return 0;
    case AmoOp::fetch_inc: return a.fetch_add(1, mo);
    case AmoOp::fetch_add: return a.fetch_add(operand, mo);
    case AmoOp::bit_and: a.fetch_and(operand, mo); return 0;
    case AmoOp::bit_or: a.fetch_or(operand, mo); return 0;
    case AmoOp::bit_xor: a.fetch_xor(operand, mo); return 0;
    case AmoOp::fetch_and: return a.fetch_and(operand, mo);
    case AmoOp::fetch_or: return a.fetch_or(operand, mo);
    case AmoOp::fetch_xor: return a.fetch_xor(operand, mo);
    default: return rmw_bits<U>(p, op, operand, static_cast<U>(cmp_bits));
  }
}

}  // namespace

std::size_t check_amo(AmoOp op, ElementType type, std::uint64_t offset) {
  if (static_cast<std::uint8_t>(op) >= kAmoOpCount)
    throw Error(ErrorCode::unsupported, "unknown atomic operation");
  if (!is_valid(type) || !amo_supports(op, type))
    throw Error(ErrorCode::unsupported, std::string(to_string(op)) + " is not defined for " +
                                            std::string(is_valid(type) ? to_string(type) : "?"));
  const std::size_t w = width(type);
  if (offset % w) throw Error(ErrorCode::misaligned, "atomic target must be aligned");
  return w;
}

std::uint64_t apply_amo(void* addr, AmoOp op, ElementType type, std::uint64_t operand,
                        std::uint64_t compare) {
  // Floats only get the bitwise ops (fetch/set/swap/cas), so width is enough.
  std::uint64_t ret = width(type) == 4 ? rmw_int<std::uint32_t>(addr, op, operand, compare)
                                       : rmw_int<std::uint64_t>(addr, op, operand, compare);
  return amo_returns_value(op) ? ret : 0;
}

}  // namespace detail

std::uint64_t amo(Context& ctx, AmoOp op, SymmetricOffset dest, std::uint64_t operand,
                  std::uint64_t compare, PeId pe, ElementType type) {
  const std::size_t w = detail::check_amo(op, type, dest.value);
  if (pe < 0 || pe >= ctx.n_pes())
    throw Error(ErrorCode::invalid_argument, "PE " + std::to_string(pe) + " out of range");
  detail::check_range(dest.value, w, ctx.heap_size());
  if (std::byte* addr = detail::direct_addr(ctx, dest.value, pe)) {
    std::uint64_t ret = detail::apply_amo(addr, op, type, operand, compare);
    if (op != AmoOp::fetch) ctx.node().ring_doorbell(ctx.node().local_state(pe));
    return ret;
  }
  RingMessage m;
  m.op = static_cast<std::uint8_t>(opcode::amo_base + static_cast<std::uint8_t>(op));
  m.dtype = static_cast<std::uint8_t>(type);
  m.dst_pe = static_cast<std::uint16_t>(pe);
  m.addr_a = dest.value;
  m.count = 1;
  m.imm1 = operand;
  m.imm2 = compare;
  return detail::submit(ctx, m, false);
}

}  // namespace pgas
