// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "executor.hpp"

#include <string>

#include "pgas/copy.hpp"

namespace pgas::detail {

std::byte* heap_addr(const Node& node, PeId pe, std::uint64_t offset, std::size_t extent) {
  if (!node.is_local(pe))
    throw Error(ErrorCode::invalid_argument, "PE " + std::to_string(pe) + " is not on this node");
  if (offset > node.heap_total || extent > node.heap_total - offset)
    throw Error(ErrorCode::invalid_address, "range [" + std::to_string(offset) + ", +" +
                                                std::to_string(extent) +
                                                ") is outside the symmetric heap");
  return node.local_state(pe).heap->base() + offset;
}

std::size_t strided_extent(std::size_t nelems, std::size_t width, std::size_t stride) {
  if (nelems == 0) return 0;
  return ((nelems - 1) * stride + 1) * width;
}

std::size_t request_payload_bytes(const RingMessage& m) {
  switch (m.op) {
    case opcode::put:
    case opcode::put_signal_set:
    case opcode::put_signal_add:
      return m.count;
    case opcode::iput:
      return m.count * width(static_cast<ElementType>(m.dtype));
    default:
      return 0;
  }
}

std::size_t reply_payload_bytes(const RingMessage& m) {
  switch (m.op) {
    case opcode::get: return m.count;
    case opcode::iget: return m.count * width(static_cast<ElementType>(m.dtype));
    default: return 0;
  }
}

std::uint64_t execute_request(Node& node, const RingMessage& m, const Payload& data) {
  const PeId target = m.dst_pe;
  auto dtype = static_cast<ElementType>(m.dtype);
  switch (m.op) {
    case opcode::nop:
      return m.imm1;
    case opcode::put: {
      std::byte* dst = heap_addr(node, target, m.addr_a, m.count);
      race_copy(dst, data.src, m.count);
      node.ring_doorbell(node.local_state(target));
      return 0;
    }
    case opcode::get: {
      const std::byte* src = heap_addr(node, target, m.addr_a, m.count);
      race_copy(data.dst, src, m.count);
      node.ring_doorbell_for(data.dst);
      return 0;
    }
    case opcode::p:
    case opcode::g: {
      if (!is_valid(dtype)) throw Error(ErrorCode::unsupported, "bad element type");
      std::size_t w = width(dtype);
      if (m.addr_a % w) throw Error(ErrorCode::misaligned, "scalar access must be aligned");
      std::byte* addr = heap_addr(node, target, m.addr_a, w);
      if (m.op == opcode::g) {
        switch (w) {
          case 1: return race_load<std::uint8_t>(addr);
          case 2: return race_load<std::uint16_t>(addr);
          case 4: return race_load<std::uint32_t>(addr);
          default: return race_load<std::uint64_t>(addr);
        }
      }
      switch (w) {
        case 1: race_store(addr, static_cast<std::uint8_t>(m.imm1)); break;
        case 2: race_store(addr, static_cast<std::uint16_t>(m.imm1)); break;
        case 4: race_store(addr, static_cast<std::uint32_t>(m.imm1)); break;
        default: race_store(addr, m.imm1); break;
      }
      node.ring_doorbell(node.local_state(target));
      return 0;
    }
    case opcode::iput: {
      if (!is_valid(dtype)) throw Error(ErrorCode::unsupported, "bad element type");
      std::size_t w = width(dtype);
      if (m.stride == 0) throw Error(ErrorCode::invalid_argument, "stride must be >= 1");
      std::byte* dst = heap_addr(node, target, m.addr_a, strided_extent(m.count, w, m.stride));
      race_copy_strided(dst, data.src, m.count, w, m.stride, data.src_stride);
      node.ring_doorbell(node.local_state(target));
      return 0;
    }
    case opcode::iget: {
      if (!is_valid(dtype)) throw Error(ErrorCode::unsupported, "bad element type");
      std::size_t w = width(dtype);
      if (m.stride == 0) throw Error(ErrorCode::invalid_argument, "stride must be >= 1");
      const std::byte* src =
          heap_addr(node, target, m.addr_a, strided_extent(m.count, w, m.stride));
      race_copy_strided(data.dst, src, m.count, w, data.dst_stride, m.stride);
      node.ring_doorbell_for(data.dst);
      return 0;
    }
    case opcode::put_signal_set:
    case opcode::put_signal_add: {
      std::byte* dst = heap_addr(node, target, m.addr_a, m.count);
      if (m.imm2 % 8) throw Error(ErrorCode::misaligned, "signal must be 8-byte aligned");
      std::byte* sig = heap_addr(node, target, m.imm2, 8);
      race_copy(dst, data.src, m.count);
      std::atomic_ref<std::uint64_t> s(*reinterpret_cast<std::uint64_t*>(sig));
      if (m.op == opcode::put_signal_set)
        s.store(m.imm1, std::memory_order_release);
      else
        s.fetch_add(m.imm1, std::memory_order_acq_rel);
      node.ring_doorbell(node.local_state(target));
      return 0;
    }
    default:
      break;
  }
  if (m.op >= opcode::amo_base && m.op < opcode::amo_base + kAmoOpCount) {
    auto op = static_cast<AmoOp>(m.op - opcode::amo_base);
    std::size_t w = check_amo(op, dtype, m.addr_a);
    std::byte* addr = heap_addr(node, target, m.addr_a, w);
    std::uint64_t ret = apply_amo(addr, op, dtype, m.imm1, m.imm2);
    if (op != AmoOp::fetch) node.ring_doorbell(node.local_state(target));
    return ret;
  }
  throw Error(ErrorCode::protocol, "unknown opcode " + opcode_name(m.op));
}

}  // namespace pgas::detail
