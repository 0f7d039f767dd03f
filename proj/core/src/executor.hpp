// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "node.hpp"
#include "pgas/ring.hpp"
#include "pgas/types.hpp"

namespace pgas::detail {

/// Performs one AMO at addr with sequentially consistent ordering. Returns
/// the prior value bits for fetching ops, 0 otherwise.
std::uint64_t apply_amo(void* addr, AmoOp op, ElementType type, std::uint64_t operand,
                        std::uint64_t compare);

/// Validates an AMO request and returns its operand width.
std::size_t check_amo(AmoOp op, ElementType type, std::uint64_t offset);

/// Where request data comes from (put-like ops) or goes to (get-like ops).
/// Strides are in elements and only apply to iput / iget.
struct Payload {
  const std::byte* src = nullptr;
  std::size_t src_stride = 1;
  std::byte* dst = nullptr;
  std::size_t dst_stride = 1;
};

/// Bounds-checked address of [offset, offset + extent) in a local PE's heap.
std::byte* heap_addr(const Node& node, PeId pe, std::uint64_t offset, std::size_t extent);

/// Bytes of extent an iput/iget touches on the symmetric side.
std::size_t strided_extent(std::size_t nelems, std::size_t width, std::size_t stride);

/// Runs a request against this node's heaps and rings the doorbell of the
/// PE written to. Returns the completion payload. Throws Error on bad input.
std::uint64_t execute_request(Node& node, const RingMessage& m, const Payload& data);

/// Bytes that follow a request frame on the wire (put-like payloads).
std::size_t request_payload_bytes(const RingMessage& m);
/// Bytes that follow a reply frame on the wire (get / iget data).
std::size_t reply_payload_bytes(const RingMessage& m);

}  // namespace pgas::detail
