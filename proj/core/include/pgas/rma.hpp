// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>

#include "pgas/runtime.hpp"
#include "pgas/types.hpp"
#include "pgas/work_group.hpp"

namespace pgas {

// One-sided remote memory access. `dest` / `src` offsets name symmetric
// objects; the other side of each call is any local buffer (heap or private).
// Blocking calls return once the bytes have landed at their destination.

void put(Context& ctx, SymmetricOffset dest, const void* src, std::size_t nbytes, PeId pe);
void get(Context& ctx, void* dest, SymmetricOffset src, std::size_t nbytes, PeId pe);

/// Completed by quiet(). `src` (for put) must stay unchanged and `dest` (for
/// get) must not be read until then.
void put_nbi(Context& ctx, SymmetricOffset dest, const void* src, std::size_t nbytes, PeId pe);
void get_nbi(Context& ctx, void* dest, SymmetricOffset src, std::size_t nbytes, PeId pe);

/// Scalar store / load of `type` given as raw bits (zero-extended).
void p_bits(Context& ctx, SymmetricOffset dest, std::uint64_t bits, ElementType type, PeId pe);
std::uint64_t g_bits(Context& ctx, SymmetricOffset src, ElementType type, PeId pe);

template <class T>
void p(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  p_bits(ctx, dest, std::bit_cast<U>(value), element_type_of<T>(), pe);
}

template <class T>
T g(Context& ctx, SymmetricOffset src, PeId pe) {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  return std::bit_cast<T>(static_cast<U>(g_bits(ctx, src, element_type_of<T>(), pe)));
}

/// Element k moves from src + k*src_stride*width to dest + k*dst_stride*width.
/// Strides are in elements and must be >= 1.
void iput(Context& ctx, SymmetricOffset dest, const void* src, std::size_t dst_stride,
          std::size_t src_stride, std::size_t nelems, ElementType type, PeId pe);
void iget(Context& ctx, void* dest, SymmetricOffset src, std::size_t dst_stride,
          std::size_t src_stride, std::size_t nelems, ElementType type, PeId pe);

/// Delivers the payload, then updates the 64-bit signal at `sig` with release
/// ordering: a reader that observes the signal also observes every byte.
void put_signal(Context& ctx, SymmetricOffset dest, const void* src, std::size_t nbytes,
                SymmetricOffset sig, std::uint64_t signal, SignalOp op, PeId pe);

/// Blocks until the local 64-bit word at `addr` compares true against value.
void wait_until(Context& ctx, SymmetricOffset addr, CmpOp cmp, std::uint64_t value);

// Work-group variants. Every lane calls with identical arguments; the direct
// path splits the bytes across work-items, the engine path has the leader
// post a single request. Blocking variants end with a group barrier.

void put_work_group(WorkGroup& wg, SymmetricOffset dest, const void* src, std::size_t nbytes,
                    PeId pe);
void get_work_group(WorkGroup& wg, void* dest, SymmetricOffset src, std::size_t nbytes, PeId pe);
void put_nbi_work_group(WorkGroup& wg, SymmetricOffset dest, const void* src,
                        std::size_t nbytes, PeId pe);
void get_nbi_work_group(WorkGroup& wg, void* dest, SymmetricOffset src, std::size_t nbytes,
                        PeId pe);

/// The path a put or get of nbytes by a G-item group would take to pe.
Path rma_path(const Context& ctx, std::size_t nbytes, int group_size, PeId pe);

}  // namespace pgas
