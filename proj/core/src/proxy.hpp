// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "node.hpp"

namespace pgas::detail {

/// The node's simulated copy engine: one thread, jobs served in FIFO order.
/// Each job waits out the link's startup latency, then copies at no more than
/// the link's bandwidth, applies an optional signal and completes its slot.
class Copier {
 public:
  struct Job {
    const std::byte* src = nullptr;
    std::byte* dst = nullptr;
    std::size_t bytes = 0;
    double startup = 0;
    double bandwidth = 0;
    std::uint64_t* signal = nullptr;
    std::uint64_t signal_value = 0;
    bool signal_add = false;
    PeState* written = nullptr;
    PeState* owner = nullptr;
    std::uint16_t slot = 0;
    bool has_completion = false;
  };

  explicit Copier(Node& node);
  ~Copier();

  void submit(Job job);
  /// Abandons queued jobs (failing their completions) and joins.
  void stop();
  std::uint64_t jobs_done() const noexcept { return done_.load(std::memory_order_relaxed); }

 private:
  void loop();
  bool sleep_until(SteadyTime deadline);
  void run(const Job& job);

  Node& node_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Job> queue_;
  bool stop_ = false;
  std::atomic<std::uint64_t> done_{0};
  std::thread thread_;
};

/// The single consumer of the node ring. Engine requests go to the copier,
/// requests for PEs on the peer node go over the link, the rest execute
/// inline.
class Proxy {
 public:
  explicit Proxy(Node& node);
  ~Proxy();

  void stop();
  /// Test mode: hold up to `window` nop requests and complete them in a
  /// shuffled order. 0 turns it off.
  void set_reorder(std::size_t window, std::uint64_t seed);
  std::uint64_t handled() const noexcept { return handled_.load(std::memory_order_relaxed); }
  /// Held nops completed at a different position than they arrived in.
  std::uint64_t reordered() const noexcept { return reordered_.load(std::memory_order_relaxed); }

 private:
  void loop();
  void handle(const RingMessage& m);
  void flush_reorder();

  Node& node_;
  std::thread thread_;
  std::atomic<std::size_t> reorder_window_{0};
  std::mt19937_64 rng_;
  std::mutex reorder_mu_;
  std::vector<RingMessage> held_;
  std::atomic<std::uint64_t> handled_{0};
  std::atomic<std::uint64_t> reordered_{0};
};

/// Completes (or fails) the slot a request carries, if any.
void complete_request(Node& node, const RingMessage& m, std::uint64_t ret);
void fail_request(Node& node, const RingMessage& m, ErrorCode code);

}  // namespace pgas::detail
