// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/ring.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <thread>

#include "le.hpp"
#include "pgas/types.hpp"

namespace pgas {

bool is_valid_opcode(std::uint8_t op) noexcept {
  if (op <= opcode::put_signal_add) return true;
  return op >= opcode::amo_base && op < opcode::amo_base + kAmoOpCount;
}

std::string opcode_name(std::uint8_t op) {
  switch (op) {
    case opcode::nop: return "nop";
    case opcode::put: return "put";
    case opcode::get: return "get";
    case opcode::p: return "p";
    case opcode::g: return "g";
    case opcode::iput: return "iput";
    case opcode::iget: return "iget";
    case opcode::put_signal_set: return "put_signal(set)";
    case opcode::put_signal_add: return "put_signal(add)";
    default: break;
  }
  if (is_valid_opcode(op))
    return "amo_" + std::string(to_string(static_cast<AmoOp>(op - opcode::amo_base)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "op_0x%02x", op);
  return buf;
}

using detail::get_le;
using detail::put_le;

std::array<std::byte, 64> encode(const RingMessage& m) noexcept {
  std::array<std::byte, 64> b{};
  put_le(&b[0], m.seq);
  b[4] = std::byte{m.op};
  b[5] = std::byte{m.dtype};
  b[6] = std::byte{m.flags};
  b[7] = std::byte{m.reserved0};
  put_le(&b[8], m.src_pe);
  put_le(&b[10], m.dst_pe);
  put_le(&b[12], m.completion_index);
  put_le(&b[14], m.reserved1);
  put_le(&b[16], m.addr_a);
  put_le(&b[24], m.addr_b);
  put_le(&b[32], m.count);
  put_le(&b[40], m.imm1);
  put_le(&b[48], m.imm2);
  put_le(&b[56], m.stride);
  return b;
}

RingMessage decode_message(std::span<const std::byte, 64> b) noexcept {
  RingMessage m;
  m.seq = get_le<std::uint32_t>(&b[0]);
  m.op = std::to_integer<std::uint8_t>(b[4]);
  m.dtype = std::to_integer<std::uint8_t>(b[5]);
  m.flags = std::to_integer<std::uint8_t>(b[6]);
  m.reserved0 = std::to_integer<std::uint8_t>(b[7]);
  m.src_pe = get_le<std::uint16_t>(&b[8]);
  m.dst_pe = get_le<std::uint16_t>(&b[10]);
  m.completion_index = get_le<std::uint16_t>(&b[12]);
  m.reserved1 = get_le<std::uint16_t>(&b[14]);
  m.addr_a = get_le<std::uint64_t>(&b[16]);
  m.addr_b = get_le<std::uint64_t>(&b[24]);
  m.count = get_le<std::uint64_t>(&b[32]);
  m.imm1 = get_le<std::uint64_t>(&b[40]);
  m.imm2 = get_le<std::uint64_t>(&b[48]);
  m.stride = get_le<std::uint64_t>(&b[56]);
  return m;
}

std::string hex_dump(const RingMessage& m) {
  static constexpr const char* kRows[4] = {
      "seq op dtype flags rsv | src_pe dst_pe cidx rsv",
      "addr_a | addr_b",
      "count | imm1",
      "imm2 | stride",
  };
  auto bytes = encode(m);
  std::string out;
  char buf[8];
  for (int row = 0; row < 4; ++row) {
    std::snprintf(buf, sizeof buf, "%02x: ", row * 16);
    out += buf;
    for (int i = 0; i < 16; ++i) {
      std::snprintf(buf, sizeof buf, "%02x", std::to_integer<unsigned>(bytes[row * 16 + i]));
      out += buf;
      out += (i == 7) ? "  " : " ";
    }
    out += " ; ";
    out += kRows[row];
    out += '\n';
  }
  return out;
}

std::uint64_t payload_checksum(const RingMessage& m) noexcept {
  // FNV-1a over everything but seq [0,4) and imm2 [48,56).
  auto bytes = encode(m);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 4; i < 64; ++i) {
    if (i >= 48 && i < 56) continue;
    h ^= std::to_integer<std::uint8_t>(bytes[i]);
    h *= 0x100000001b3ull;
  }
  return h;
}

Ring::Ring(std::size_t capacity, std::size_t publish_interval)
    : capacity_(capacity), interval_(std::min(publish_interval, capacity)) {
  if (capacity < 2 || !std::has_single_bit(capacity))
    throw Error(ErrorCode::invalid_config, "ring capacity must be a power of two >= 2");
  if (publish_interval == 0)
    throw Error(ErrorCode::invalid_config, "publish interval must be positive");
  slots_ = std::make_unique<Slot[]>(capacity);
}

std::uint64_t Ring::send(const RingMessage& msg) {
  if (is_shutdown()) throw Error(ErrorCode::send_after_shutdown, "ring is shut down");
  const std::uint64_t t = ticket_.fetch_add(1, std::memory_order_relaxed);

  if (t - published_.load(std::memory_order_acquire) >= capacity_) {
    // Full: spin a little, then sleep until the consumer publishes progress.
    for (int i = 0; i < 64 && t - published_.load(std::memory_order_acquire) >= capacity_; ++i)
      std::this_thread::yield();
    full_waiters_.fetch_add(1, std::memory_order_seq_cst);
    for (;;) {
      std::uint32_t epoch = space_epoch_.load(std::memory_order_seq_cst);
      if (t - published_.load(std::memory_order_seq_cst) < capacity_) break;
      if (is_shutdown()) {
        full_waiters_.fetch_sub(1);
        throw Error(ErrorCode::send_after_shutdown, "ring shut down while waiting for space");
      }
      space_epoch_.wait(epoch, std::memory_order_acquire);
    }
    full_waiters_.fetch_sub(1, std::memory_order_relaxed);
  }

  RingMessage& slot = slots_[slot_of(t)].msg;
  // Everything but seq is plain stores; the consumer does not look at them
  // until the stamp below is visible.
  std::memcpy(reinterpret_cast<std::byte*>(&slot) + 4, reinterpret_cast<const std::byte*>(&msg) + 4,
              sizeof(RingMessage) - 4);
  std::atomic_ref<std::uint32_t>(slot.seq).store(static_cast<std::uint32_t>(t + 1),
                                                 std::memory_order_release);

  std::atomic_thread_fence(std::memory_order_seq_cst);
  if (parked_.load(std::memory_order_relaxed) != 0) {
    parked_.store(0, std::memory_order_relaxed);
    parked_.notify_one();
  }
  return t;
}

bool Ring::slot_ready(std::uint64_t ticket) const noexcept {
  auto& seq = const_cast<std::uint32_t&>(slots_[slot_of(ticket)].msg.seq);
  return std::atomic_ref<std::uint32_t>(seq).load(std::memory_order_acquire) ==
         static_cast<std::uint32_t>(ticket + 1);
}

std::optional<RingMessage> Ring::take() {
  if (!slot_ready(consumed_)) return std::nullopt;
  RingMessage out;
  const RingMessage& slot = slots_[slot_of(consumed_)].msg;
  std::memcpy(reinterpret_cast<std::byte*>(&out) + 4, reinterpret_cast<const std::byte*>(&slot) + 4,
              sizeof(RingMessage) - 4);
  out.seq = static_cast<std::uint32_t>(consumed_ + 1);
  ++consumed_;
  if (consumed_ % interval_ == 0) {
    published_.store(consumed_, std::memory_order_seq_cst);
    publish_writes_.fetch_add(1, std::memory_order_relaxed);
    space_epoch_.fetch_add(1, std::memory_order_seq_cst);
    if (full_waiters_.load(std::memory_order_seq_cst) != 0) space_epoch_.notify_all();
  }
  return out;
}

std::optional<RingMessage> Ring::try_consume() { return take(); }

std::optional<RingMessage> Ring::consume_wait() {
  for (;;) {
    for (int spin = 0; spin < 32; ++spin) {
      if (auto m = take()) return m;
      if (is_shutdown()) return take();
      if (spin >= 8) std::this_thread::yield();
    }
    parked_.store(1, std::memory_order_relaxed);
    std::atomic_thread_fence(std::memory_order_seq_cst);
    if (slot_ready(consumed_) || is_shutdown()) {
      parked_.store(0, std::memory_order_relaxed);
      continue;
    }
    parked_.wait(1, std::memory_order_acquire);
  }
}

void Ring::shutdown() {
  shutdown_.store(true, std::memory_order_seq_cst);
  parked_.store(0);
  parked_.notify_all();
  // Wake producers stuck on a full ring so they can observe the flag.
  space_epoch_.fetch_add(1);
  space_epoch_.notify_all();
}

RingMessage Ring::peek_slot(std::size_t index) const noexcept {
  RingMessage out;
  std::memcpy(&out, &slots_[index & (capacity_ - 1)].msg, sizeof out);
  return out;
}

}  // namespace pgas
