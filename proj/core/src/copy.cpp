// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/copy.hpp"

namespace pgas {

namespace {

template <class U>
void copy_units(std::byte*& d, const std::byte*& s, std::size_t& n) noexcept {
  std::size_t units = n / sizeof(U);
  auto* du = reinterpret_cast<U*>(d);
  auto* su = reinterpret_cast<U*>(const_cast<std::byte*>(s));
  for (std::size_t i = 0; i < units; ++i)
    std::atomic_ref<U>(du[i]).store(std::atomic_ref<U>(su[i]).load(std::memory_order_relaxed),
                                    std::memory_order_relaxed);
  d += units * sizeof(U);
  s += units * sizeof(U);
  n -= units * sizeof(U);
}

void copy_bytes(std::byte* d, const std::byte* s, std::size_t n) noexcept {
  copy_units<std::uint8_t>(d, s, n);
}

}  // namespace

void race_copy(void* dst, const void* src, std::size_t n) noexcept {
  auto* d = static_cast<std::byte*>(dst);
  auto* s = static_cast<const std::byte*>(src);
  if (n == 0 || d == s) return;
  auto da = reinterpret_cast<std::uintptr_t>(d);
  auto sa = reinterpret_cast<std::uintptr_t>(s);
  std::size_t common = (da ^ sa) & 7;
  std::size_t unit = common == 0 ? 8 : (common & 3) == 0 ? 4 : (common & 1) == 0 ? 2 : 1;
  // Head up to unit alignment.
  std::size_t head = (unit - (da & (unit - 1))) & (unit - 1);
  if (head > n) head = n;
  copy_bytes(d, s, head);
  d += head;
  s += head;
  n -= head;
  switch (unit) {
    case 8: copy_units<std::uint64_t>(d, s, n); break;
    case 4: copy_units<std::uint32_t>(d, s, n); break;
    case 2: copy_units<std::uint16_t>(d, s, n); break;
    default: break;
  }
  copy_bytes(d, s, n);
}

void race_copy_strided(void* dst, const void* src, std::size_t nelems, std::size_t width,
                       std::size_t dst_stride, std::size_t src_stride) noexcept {
  auto* d = static_cast<std::byte*>(dst);
  auto* s = static_cast<const std::byte*>(src);
  if (dst_stride == 1 && src_stride == 1) {
    race_copy(d, s, nelems * width);
    return;
  }
  for (std::size_t k = 0; k < nelems; ++k)
    race_copy(d + k * dst_stride * width, s + k * src_stride * width, width);
}

}  // namespace pgas
