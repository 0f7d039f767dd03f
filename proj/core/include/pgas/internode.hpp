// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "pgas/ring.hpp"

namespace pgas {

/// Frame layouts spoken between two node daemons. All integers are
/// little-endian. Every frame opens with magic u32, version u8, kind u8 and
/// a reserved u16.
namespace wire {

inline constexpr std::uint32_t kMagic = 0x50474153;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 8;
/// Header plus a 64-byte request image whose seq is the link sequence number.
inline constexpr std::size_t kRequestBytes = 72;
/// Header plus completion_index u16, status u8, pad u8, ret u64, pad 4.
inline constexpr std::size_t kReplyBytes = 24;
/// Header plus npes_local u32, pe_base u32, world u32, pad u32, heap_size u64.
inline constexpr std::size_t kHelloBytes = 32;

enum class Kind : std::uint8_t { request = 0, reply = 1, hello = 2 };

enum class Status : std::uint8_t { ok = 0, error = 1 };

struct Reply {
  /// (src_pe - requester pe_base) * 256 + completion slot.
  std::uint16_t completion_index = 0;
  Status status = Status::ok;
  /// Result payload, or the ErrorCode value when status is error.
  std::uint64_t ret = 0;
  friend bool operator==(const Reply&, const Reply&) = default;
};

struct Hello {
  std::uint32_t npes_local = 0;
  std::uint32_t pe_base = 0;
  /// World size the sender was configured with; 0 when unspecified.
  std::uint32_t world = 0;
  std::uint64_t heap_size = 0;
  friend bool operator==(const Hello&, const Hello&) = default;
};

std::array<std::byte, kRequestBytes> encode_request(const RingMessage& m) noexcept;
std::array<std::byte, kReplyBytes> encode_reply(const Reply& r) noexcept;
std::array<std::byte, kHelloBytes> encode_hello(const Hello& h) noexcept;

/// Validates magic and version and returns the kind. Throws protocol.
Kind decode_header(std::span<const std::byte, kHeaderBytes> header);
RingMessage decode_request(std::span<const std::byte, kRequestBytes> frame);
Reply decode_reply(std::span<const std::byte, kReplyBytes> frame);
Hello decode_hello(std::span<const std::byte, kHelloBytes> frame);

std::string hex(std::span<const std::byte> bytes);

}  // namespace wire

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// "host:port". Throws invalid_config.
Endpoint parse_endpoint(std::string_view text);

/// Binds an ephemeral loopback port, releases it and returns the number.
/// Handy for tests that need two nodes to agree on an endpoint.
std::uint16_t pick_free_port();

}  // namespace pgas
