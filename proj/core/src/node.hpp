// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "pgas/completion.hpp"
#include "pgas/config.hpp"
#include "pgas/cost_model.hpp"
#include "pgas/cutover.hpp"
#include "pgas/heap.hpp"
#include "pgas/ring.hpp"
#include "pgas/team.hpp"

namespace pgas::detail {

class Proxy;
class Copier;
class Link;

struct TeamData {
  int id = 0;
  std::vector<PeId> members;
  int my_rank = -1;
  SymmetricOffset psync;
  std::uint64_t epoch = 0;
};

// psync block layout: sync counter at +0, collect sizes from +64.
inline constexpr std::size_t kPsyncCounter = 0;
inline constexpr std::size_t kPsyncSizes = 64;
inline constexpr std::size_t kMaxTeams = 256;

inline std::size_t psync_block_bytes(int world) {
  return (kPsyncSizes + 8 * static_cast<std::size_t>(world) + 63) / 64 * 64;
}

struct PeState {
  PeId pe = 0;
  int local = 0;
  std::unique_ptr<SymmetricHeap> heap;
  AccessTable table;
  CompletionPool pool;
  // Bumped after every write into this PE's heap; local waiters sleep on it.
  alignas(64) std::atomic<std::uint32_t> doorbell{0};
  std::atomic<std::uint32_t> doorbell_waiters{0};
  std::mutex alloc_mutex;
  Team world;
  Team shared;
};

class Node {
 public:
  explicit Node(RuntimeConfig config);
  ~Node();

  void shutdown_services();

  bool is_local(PeId pe) const noexcept { return pe >= pe_base && pe < pe_base + npes_local; }
  PeState& local_state(PeId pe) const { return *pes[static_cast<std::size_t>(pe - pe_base)]; }

  void ring_doorbell(PeState& pe) noexcept {
    pe.doorbell.fetch_add(1, std::memory_order_seq_cst);
    if (pe.doorbell_waiters.load(std::memory_order_seq_cst) != 0) pe.doorbell.notify_all();
  }
  /// Rings the doorbell of the local PE whose heap contains p, if any.
  void ring_doorbell_for(const void* p) noexcept;

  /// Blocks until pred() holds, sleeping on pe's doorbell between checks.
  template <class Pred>
  void wait_for(PeState& pe, Pred&& pred);

  /// Marks the node failed and wakes every waiter.
  void abort_all() noexcept;
  void check_aborted() const;

  RuntimeConfig cfg;
  CostModel cost;
  CutoverPolicy policy;
  int npes_local = 1;
  PeId pe_base = 0;
  int world = 1;
  int lanes_default = 1;
  std::size_t heap_user = 0;
  std::size_t heap_total = 0;
  std::size_t psync_block = 0;

  std::vector<std::unique_ptr<PeState>> pes;
  std::unique_ptr<Ring> ring;
  std::unique_ptr<Copier> copier;
  std::unique_ptr<Proxy> proxy;
  std::unique_ptr<Link> link;

  std::atomic<bool> aborted{false};
  bool finalized = false;
  bool standalone_token = false;
};

template <class Pred>
void Node::wait_for(PeState& pe, Pred&& pred) {
  for (int i = 0; i < 16; ++i) {
    if (pred()) return;
    std::this_thread::yield();
  }
  pe.doorbell_waiters.fetch_add(1, std::memory_order_seq_cst);
  struct Leave {
    PeState& pe;
    ~Leave() { pe.doorbell_waiters.fetch_sub(1, std::memory_order_relaxed); }
  } leave{pe};
  for (;;) {
    std::uint32_t v = pe.doorbell.load(std::memory_order_seq_cst);
    if (pred()) return;
    check_aborted();
    pe.doorbell.wait(v, std::memory_order_acquire);
  }
}

}  // namespace pgas::detail
