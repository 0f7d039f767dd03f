// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pgas/error.hpp"

namespace pgas {

enum class SlotStatus : std::uint32_t { empty = 0, pending = 1, done = 2, error = 3 };

/// Reply slot for one proxied request. One waiter, one completer.
struct CompletionSlot {
  std::atomic<std::uint32_t> status{0};
  std::uint64_t ret = 0;
  std::uint8_t opcode = 0;
  bool nbi = false;
  std::uint64_t order = 0;
};

/// Fixed pool of completion slots owned by one PE. Blocking requests are
/// waited by the thread that issued them; non-blocking ones are reaped by
/// quiet() or by alloc() when the pool runs dry.
class CompletionPool {
 public:
  static constexpr std::size_t kSlots = 256;

  CompletionPool() = default;
  CompletionPool(const CompletionPool&) = delete;
  CompletionPool& operator=(const CompletionPool&) = delete;

  /// Lowest free index, marked pending. When the pool is exhausted the caller
  /// reaps its oldest non-blocking request (or sleeps until a slot frees).
  std::uint16_t alloc(std::uint8_t opcode, bool nbi);
  std::optional<std::uint16_t> try_alloc(std::uint8_t opcode, bool nbi);

  /// Completer side.
  void complete(std::uint16_t index, std::uint64_t ret);
  /// Marks the slot failed; ret carries an ErrorCode value.
  void fail(std::uint16_t index, ErrorCode code);

  /// Blocks until the slot leaves pending, recycles it and returns ret.
  /// Throws remote_failure (with the opcode name) on error status.
  std::uint64_t wait(std::uint16_t index);

  /// Waits for and recycles every outstanding non-blocking slot. Throws the
  /// first error observed, including errors reaped earlier by alloc().
  void quiet();

  std::size_t outstanding() const noexcept;
  std::size_t outstanding_nbi() const noexcept;
  /// (index, opcode) of every slot still pending.
  std::vector<std::pair<std::uint16_t, std::uint8_t>> pending() const;

  SlotStatus status(std::uint16_t index) const noexcept {
    return static_cast<SlotStatus>(slots_[index].status.load(std::memory_order_acquire));
  }

 private:
  static constexpr std::size_t kWords = kSlots / 64;

  bool reap_one_nbi_locked();
  void release(std::uint16_t index);
  std::uint64_t finish(std::uint16_t index, std::string* error);

  std::array<CompletionSlot, kSlots> slots_{};
  std::array<std::atomic<std::uint64_t>, kWords> used_{};
  std::array<std::atomic<std::uint64_t>, kWords> nbi_{};
  std::atomic<std::uint64_t> order_{0};
  std::atomic<std::uint32_t> free_epoch_{0};
  std::atomic<std::uint32_t> free_waiters_{0};
  // Serializes every reaper of non-blocking slots.
  std::mutex reap_mutex_;
  std::string deferred_error_;
};

}  // namespace pgas
