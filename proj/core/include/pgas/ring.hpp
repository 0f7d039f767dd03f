// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>

namespace pgas {

/// Request opcodes. AMOs are encoded as kOpAmoBase + AmoOp.
namespace opcode {
inline constexpr std::uint8_t nop = 0x00;
inline constexpr std::uint8_t put = 0x01;
inline constexpr std::uint8_t get = 0x02;
inline constexpr std::uint8_t p = 0x03;
inline constexpr std::uint8_t g = 0x04;
inline constexpr std::uint8_t iput = 0x05;
inline constexpr std::uint8_t iget = 0x06;
inline constexpr std::uint8_t put_signal_set = 0x07;
inline constexpr std::uint8_t put_signal_add = 0x08;
inline constexpr std::uint8_t amo_base = 0x40;
}  // namespace opcode

bool is_valid_opcode(std::uint8_t op) noexcept;
std::string opcode_name(std::uint8_t op);

namespace msg_flag {
inline constexpr std::uint8_t completion = 0x01;
/// addr_b is a raw pointer valid only in the issuing process.
inline constexpr std::uint8_t local_token = 0x02;
/// Route through the copy engine instead of executing inline.
inline constexpr std::uint8_t engine = 0x04;
inline constexpr std::uint8_t nbi = 0x08;
}  // namespace msg_flag

/// The fixed 64-byte request record. Field order is the wire layout; the
/// struct is only ever copied as a whole on little-endian hosts.
struct RingMessage {
  std::uint32_t seq = 0;
  std::uint8_t op = 0;
  std::uint8_t dtype = 0;
  std::uint8_t flags = 0;
  std::uint8_t reserved0 = 0;
  std::uint16_t src_pe = 0;
  std::uint16_t dst_pe = 0;
  std::uint16_t completion_index = 0;
  std::uint16_t reserved1 = 0;
  std::uint64_t addr_a = 0;
  std::uint64_t addr_b = 0;
  std::uint64_t count = 0;
  std::uint64_t imm1 = 0;
  std::uint64_t imm2 = 0;
  std::uint64_t stride = 0;

  friend bool operator==(const RingMessage&, const RingMessage&) = default;
};
static_assert(sizeof(RingMessage) == 64);
static_assert(offsetof(RingMessage, op) == 4);
static_assert(offsetof(RingMessage, src_pe) == 8);
static_assert(offsetof(RingMessage, completion_index) == 12);
static_assert(offsetof(RingMessage, addr_a) == 16);
static_assert(offsetof(RingMessage, stride) == 56);

/// Explicit little-endian serialization, independent of host byte order.
std::array<std::byte, 64> encode(const RingMessage& m) noexcept;
RingMessage decode_message(std::span<const std::byte, 64> bytes) noexcept;

/// Four rows of 16 bytes, each annotated with the fields it covers.
std::string hex_dump(const RingMessage& m);

/// Checksum of every field except seq and imm2; test mode stores it in imm2.
std::uint64_t payload_checksum(const RingMessage& m) noexcept;

/// Multi-producer, single-consumer queue of RingMessages.
///
/// Producers take a ticket with one fetch_add, write the payload, then stamp
/// seq = ticket + 1 with release. The consumer only trusts a slot whose stamp
/// matches the ticket it expects next, and publishes its progress every
/// `publish_interval` messages for producers to check admission against.
class Ring {
 public:
  explicit Ring(std::size_t capacity = 4096, std::size_t publish_interval = 64);
  Ring(const Ring&) = delete;
  Ring& operator=(const Ring&) = delete;

  /// Returns the ticket. Blocks while the ring is full. Throws
  /// send_after_shutdown once shutdown() has been called.
  std::uint64_t send(const RingMessage& msg);

  /// Consumer side. nullopt when the next slot is not stamped yet.
  std::optional<RingMessage> try_consume();
  /// Consumer side. Polls briefly, then parks until a producer stamps the
  /// next slot. nullopt only after shutdown with nothing left to read.
  std::optional<RingMessage> consume_wait();

  void shutdown();
  bool is_shutdown() const noexcept { return shutdown_.load(std::memory_order_acquire); }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t publish_interval() const noexcept { return interval_; }
  std::uint64_t tickets_issued() const noexcept { return ticket_.load(std::memory_order_acquire); }
  /// Consumer-private progress; only meaningful on the consumer thread.
  std::uint64_t consumed() const noexcept { return consumed_; }
  std::uint64_t published() const noexcept {
    return published_.load(std::memory_order_acquire);
  }
  std::uint64_t publish_writes() const noexcept {
    return publish_writes_.load(std::memory_order_relaxed);
  }

  std::size_t slot_of(std::uint64_t ticket) const noexcept { return ticket & (capacity_ - 1); }
  std::uint64_t lap_of(std::uint64_t ticket) const noexcept { return ticket / capacity_; }
  /// Raw slot contents for dumps. Not synchronized.
  RingMessage peek_slot(std::size_t index) const noexcept;

 private:
  struct alignas(64) Slot {
    RingMessage msg;
  };

  bool slot_ready(std::uint64_t ticket) const noexcept;
  std::optional<RingMessage> take();

  std::size_t capacity_;
  std::size_t interval_;
  std::unique_ptr<Slot[]> slots_;

  alignas(64) std::atomic<std::uint64_t> ticket_{0};
  alignas(64) std::atomic<std::uint64_t> published_{0};
  std::atomic<std::uint32_t> space_epoch_{0};
  std::atomic<std::uint32_t> full_waiters_{0};
  std::atomic<std::uint64_t> publish_writes_{0};
  alignas(64) std::uint64_t consumed_ = 0;
  std::atomic<std::uint32_t> parked_{0};
  std::atomic<bool> shutdown_{false};
};

}  // namespace pgas
