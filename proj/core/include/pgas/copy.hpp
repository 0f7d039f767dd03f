// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <type_traits>

namespace pgas {

// Heap memory is shared between PE threads without locks, so every access to
// it goes through relaxed atomic_ref. On x86-64 these are plain moves.

template <class T>
T race_load(const void* p, std::memory_order mo = std::memory_order_relaxed) noexcept {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  static_assert(sizeof(T) == sizeof(U));
  U bits = std::atomic_ref<U>(*static_cast<U*>(const_cast<void*>(p))).load(mo);
  return std::bit_cast<T>(bits);
}

template <class T>
void race_store(void* p, T v, std::memory_order mo = std::memory_order_relaxed) noexcept {
  using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
            std::conditional_t<sizeof(T) == 2, std::uint16_t,
            std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
  static_assert(sizeof(T) == sizeof(U));
  std::atomic_ref<U>(*static_cast<U*>(p)).store(std::bit_cast<U>(v), mo);
}

/// memcpy built from relaxed atomic accesses: 8-byte words when source and
/// destination share alignment, narrower units otherwise.
void race_copy(void* dst, const void* src, std::size_t n) noexcept;

/// Element k goes from src + k*src_stride*width to dst + k*dst_stride*width.
void race_copy_strided(void* dst, const void* src, std::size_t nelems, std::size_t width,
                       std::size_t dst_stride, std::size_t src_stride) noexcept;

}  // namespace pgas
