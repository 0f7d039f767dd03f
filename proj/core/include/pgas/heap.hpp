// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pgas/types.hpp"

namespace pgas {

/// One PE's symmetric region. The user part [0, size) is handed out by a bump
/// allocator; an internal tail after it holds team sync blocks.
class SymmetricHeap {
 public:
  static constexpr std::size_t kAlignment = 64;

  SymmetricHeap(std::size_t user_size, std::size_t internal_size);
  ~SymmetricHeap();
  SymmetricHeap(const SymmetricHeap&) = delete;
  SymmetricHeap& operator=(const SymmetricHeap&) = delete;

  std::byte* base() const noexcept { return base_; }
  /// User-visible size.
  std::size_t size() const noexcept { return size_; }
  /// User size plus the internal tail.
  std::size_t total_size() const noexcept { return total_; }
  std::size_t cursor() const noexcept { return cursor_; }

  /// Bump allocation; memory is zero from construction and never reused.
  /// Throws heap_exhausted without moving the cursor.
  SymmetricOffset alloc(std::size_t nbytes);

  /// Allocation inside the internal tail, offset relative to base().
  SymmetricOffset alloc_internal(std::size_t nbytes);
  std::size_t internal_cursor() const noexcept { return internal_cursor_; }
  void set_internal_cursor(std::size_t c);

  bool contains(const void* p, std::size_t n = 1) const noexcept;
  std::byte* at(SymmetricOffset off) const noexcept { return base_ + off.value; }

 private:
  std::byte* base_ = nullptr;
  std::size_t size_;
  std::size_t total_;
  std::size_t cursor_ = 0;
  std::size_t internal_cursor_;
};

/// Per-PE view of which peers are load/store reachable and how far their heap
/// bases sit from ours.
class AccessTable {
 public:
  AccessTable() = default;

  /// bases[pe] is the heap base of pe, or 0 when pe is not directly reachable.
  AccessTable(PeId self, std::span<const std::uintptr_t> bases, std::size_t heap_bytes);

  PeId self() const noexcept { return self_; }
  int npes() const noexcept { return static_cast<int>(local_index_.size()); }
  /// 0 when not direct, otherwise a 1-based index into offsets().
  std::uint32_t local_index(PeId pe) const { return local_index_.at(static_cast<std::size_t>(pe)); }
  const std::vector<std::int64_t>& offsets() const noexcept { return offsets_; }
  bool is_direct(PeId pe) const noexcept {
    return pe >= 0 && pe < npes() && local_index_[static_cast<std::size_t>(pe)] != 0;
  }

  /// local_addr + offsets[local_index[target] - 1], or nullopt for non-direct
  /// targets. Throws invalid_address when local_addr is outside our heap.
  std::optional<std::uintptr_t> translate(std::uintptr_t local_addr, PeId target) const;

 private:
  PeId self_ = 0;
  std::uintptr_t local_base_ = 0;
  std::size_t heap_bytes_ = 0;
  std::vector<std::uint32_t> local_index_;
  std::vector<std::int64_t> offsets_;
};

}  // namespace pgas
