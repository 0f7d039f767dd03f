// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "node.hpp"
#include "pgas/internode.hpp"

namespace pgas::detail {

/// One bidirectional TCP connection to the peer node. The local proxy
/// forwards requests through it; the receiver thread serves the peer's
/// requests inline and in arrival order, and matches replies to pending
/// completions. A sender thread owns all writes so neither side can block
/// the other's receiver.
class Link {
 public:
  /// Connects (node_b) or accepts (node_a) and exchanges hello frames.
  /// Throws geometry_mismatch or link_failure.
  static std::unique_ptr<Link> establish(const RuntimeConfig& cfg, int npes_local,
                                         std::size_t heap_size);
  ~Link();

  PeId my_pe_base() const noexcept { return my_base_; }
  PeId peer_pe_base() const noexcept { return peer_base_; }
  int peer_npes() const noexcept { return peer_npes_; }
  int world() const noexcept { return my_npes_ + peer_npes_; }

  void start(Node& node);
  /// Called by the proxy. Fails the request's completion when the link is down.
  void forward(const RingMessage& m);
  void close();
  bool up() const noexcept { return up_.load(std::memory_order_acquire); }

 private:
  Link(int fd, int my_npes, PeId my_base, int peer_npes, PeId peer_base, bool trace);

  void enqueue(std::vector<std::byte> frame);
  void sender_loop();
  void receiver_loop();
  void serve_request(const RingMessage& m, std::vector<std::byte>& payload);
  void take_reply(const wire::Reply& r);
  void go_down(const char* reason);
  bool read_exact(std::byte* p, std::size_t n);
  void trace(const char* dir, std::span<const std::byte> bytes);

  int fd_;
  int my_npes_;
  PeId my_base_;
  int peer_npes_;
  PeId peer_base_;
  bool trace_;
  Node* node_ = nullptr;

  std::atomic<bool> up_{true};
  std::atomic<bool> closing_{false};
  std::uint32_t out_seq_ = 0;
  std::uint32_t in_seq_ = 0;

  std::mutex send_mu_;
  std::condition_variable send_cv_;
  std::deque<std::vector<std::byte>> outbox_;
  bool send_stop_ = false;

  std::mutex pending_mu_;
  std::unordered_map<std::uint16_t, RingMessage> pending_;

  std::thread sender_;
  std::thread receiver_;
};

}  // namespace pgas::detail
