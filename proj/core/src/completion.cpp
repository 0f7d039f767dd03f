// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/completion.hpp"

#include <bit>
#include <limits>
#include <thread>

#include "pgas/ring.hpp"

namespace pgas {

std::optional<std::uint16_t> CompletionPool::try_alloc(std::uint8_t opcode, bool nbi) {
  for (std::size_t w = 0; w < kWords; ++w) {
    std::uint64_t v = used_[w].load(std::memory_order_relaxed);
    while (~v != 0) {
      std::uint64_t bit = std::uint64_t{1} << std::countr_zero(~v);
      if (used_[w].compare_exchange_weak(v, v | bit, std::memory_order_acquire,
                                         std::memory_order_relaxed)) {
        auto index = static_cast<std::uint16_t>(w * 64 + std::countr_zero(bit));
        CompletionSlot& s = slots_[index];
        s.ret = 0;
        s.opcode = opcode;
        s.nbi = nbi;
        s.order = order_.fetch_add(1, std::memory_order_relaxed);
        s.status.store(static_cast<std::uint32_t>(SlotStatus::pending), std::memory_order_release);
        if (nbi) nbi_[w].fetch_or(bit, std::memory_order_release);
        return index;
      }
    }
  }
  return std::nullopt;
}

std::uint16_t CompletionPool::alloc(std::uint8_t opcode, bool nbi) {
  for (;;) {
    if (auto idx = try_alloc(opcode, nbi)) return *idx;
    std::uint32_t epoch = free_epoch_.load(std::memory_order_seq_cst);
    {
      std::lock_guard lk(reap_mutex_);
      if (reap_one_nbi_locked()) continue;
    }
    if (auto idx = try_alloc(opcode, nbi)) return *idx;
    // Every slot is held by a blocking request; their owners free them.
    free_waiters_.fetch_add(1, std::memory_order_seq_cst);
    if (free_epoch_.load(std::memory_order_seq_cst) == epoch) free_epoch_.wait(epoch);
    free_waiters_.fetch_sub(1, std::memory_order_relaxed);
  }
}

void CompletionPool::complete(std::uint16_t index, std::uint64_t ret) {
  CompletionSlot& s = slots_[index];
  s.ret = ret;
  s.status.store(static_cast<std::uint32_t>(SlotStatus::done), std::memory_order_release);
  s.status.notify_all();
}

void CompletionPool::fail(std::uint16_t index, ErrorCode code) {
  CompletionSlot& s = slots_[index];
  s.ret = static_cast<std::uint64_t>(code);
  s.status.store(static_cast<std::uint32_t>(SlotStatus::error), std::memory_order_release);
  s.status.notify_all();
}

void CompletionPool::release(std::uint16_t index) {
  std::uint64_t bit = std::uint64_t{1} << (index % 64);
  nbi_[index / 64].fetch_and(~bit, std::memory_order_relaxed);
  slots_[index].status.store(static_cast<std::uint32_t>(SlotStatus::empty),
                             std::memory_order_relaxed);
  used_[index / 64].fetch_and(~bit, std::memory_order_release);
  free_epoch_.fetch_add(1, std::memory_order_seq_cst);
  if (free_waiters_.load(std::memory_order_seq_cst) != 0) free_epoch_.notify_all();
}

std::uint64_t CompletionPool::finish(std::uint16_t index, std::string* error) {
  CompletionSlot& s = slots_[index];
  std::uint32_t st;
  int spins = 0;
  while ((st = s.status.load(std::memory_order_acquire)) ==
         static_cast<std::uint32_t>(SlotStatus::pending)) {
    if (++spins < 16) {
      std::this_thread::yield();
      continue;
    }
    s.status.wait(st, std::memory_order_acquire);
  }
  std::uint64_t ret = s.ret;
  if (st == static_cast<std::uint32_t>(SlotStatus::error)) {
    *error = opcode_name(s.opcode) + " (completion " + std::to_string(index) + ") failed: " +
             std::string(to_string(static_cast<ErrorCode>(ret)));
  }
  release(index);
  return ret;
}

std::uint64_t CompletionPool::wait(std::uint16_t index) {
  std::string error;
  std::uint64_t ret = finish(index, &error);
  if (!error.empty()) throw Error(ErrorCode::remote_failure, error);
  return ret;
}

bool CompletionPool::reap_one_nbi_locked() {
  // Oldest outstanding non-blocking request first.
  int best = -1;
  std::uint64_t best_order = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t w = 0; w < kWords; ++w) {
    std::uint64_t v = nbi_[w].load(std::memory_order_acquire);
    while (v) {
      int i = static_cast<int>(w * 64) + std::countr_zero(v);
      v &= v - 1;
      if (slots_[i].order < best_order) {
        best_order = slots_[i].order;
        best = i;
      }
    }
  }
  if (best < 0) return false;
  std::string error;
  finish(static_cast<std::uint16_t>(best), &error);
  if (!error.empty() && deferred_error_.empty()) deferred_error_ = error;
  return true;
}

void CompletionPool::quiet() {
  std::lock_guard lk(reap_mutex_);
  while (reap_one_nbi_locked()) {
  }
  if (!deferred_error_.empty()) {
    std::string e = std::move(deferred_error_);
    deferred_error_.clear();
    throw Error(ErrorCode::remote_failure, e);
  }
}

std::size_t CompletionPool::outstanding() const noexcept {
  std::size_t n = 0;
  for (auto& w : used_) n += static_cast<std::size_t>(std::popcount(w.load()));
  return n;
}

std::size_t CompletionPool::outstanding_nbi() const noexcept {
  std::size_t n = 0;
  for (auto& w : nbi_) n += static_cast<std::size_t>(std::popcount(w.load()));
  return n;
}

std::vector<std::pair<std::uint16_t, std::uint8_t>> CompletionPool::pending() const {
  std::vector<std::pair<std::uint16_t, std::uint8_t>> out;
  for (std::size_t i = 0; i < kSlots; ++i) {
    if (!(used_[i / 64].load() >> (i % 64) & 1)) continue;
    if (status(static_cast<std::uint16_t>(i)) == SlotStatus::pending)
      out.emplace_back(static_cast<std::uint16_t>(i), slots_[i].opcode);
  }
  return out;
}

}  // namespace pgas
