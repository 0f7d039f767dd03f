// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>

#include "pgas/config.hpp"
#include "pgas/cost_model.hpp"
#include "pgas/cutover.hpp"
#include "pgas/heap.hpp"
#include "pgas/team.hpp"
#include "pgas/types.hpp"
#include "pgas/work_group.hpp"

namespace pgas {

namespace detail {
class Node;
struct PeState;
}  // namespace detail

/// Handle a PE's code receives from Runtime::run. Not shareable across PEs;
/// the lanes of a work-group launched from it may use it concurrently.
class Context {
 public:
  PeId my_pe() const noexcept;
  int n_pes() const noexcept;

  /// Collective over all PEs with matching call order. Returns the same
  /// zero-filled offset everywhere.
  SymmetricOffset symm_alloc(std::size_t nbytes);

  std::byte* heap_base() const noexcept;
  std::size_t heap_size() const noexcept;
  template <class T = std::byte>
  T* local(SymmetricOffset off) const noexcept {
    return reinterpret_cast<T*>(heap_base() + off.value);
  }
  SymmetricOffset offset_of(const void* local_addr) const;

  const AccessTable& access_table() const noexcept;
  bool is_direct(PeId pe) const noexcept;
  /// Address of local_addr's counterpart on target, or nullopt when target
  /// is not load/store reachable.
  std::optional<void*> translate(const void* local_addr, PeId target) const;

  /// Completes every outstanding non-blocking and proxied operation.
  void quiet();
  /// Same as quiet().
  void fence();

  const Team& team_world() const noexcept;
  /// The PEs hosted on this node.
  const Team& team_shared() const noexcept;

  /// Runs fn once per lane of a G-item work-group and joins. lanes = 0 uses
  /// the configured default.
  void work_group(int group_size, const std::function<void(WorkGroup&)>& fn, int lanes = 0);

  const RuntimeConfig& config() const noexcept;
  const CostModel& cost_model() const noexcept;
  const CutoverPolicy& cutover() const noexcept;

  detail::Node& node() const noexcept { return *node_; }
  detail::PeState& state() const noexcept { return *pe_; }

 private:
  friend class Runtime;
  Context(detail::Node& node, detail::PeState& pe) : node_(&node), pe_(&pe) {}

  detail::Node* node_;
  detail::PeState* pe_;
};

/// Owns the PEs of one node: heaps, the ring, the proxy and copier threads,
/// and the link to a peer node when running as node_a or node_b.
class Runtime {
 public:
  explicit Runtime(RuntimeConfig cfg);
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Runs fn on one thread per local PE and joins. The first exception is
  /// rethrown after all PEs stop; a failing PE wakes peers blocked in
  /// synchronization so they fail too instead of hanging.
  void run(const std::function<void(Context&)>& fn);

  /// Stops the service threads; heaps stay readable until destruction. Throws
  /// pending_operations (after tearing down) if requests were still in
  /// flight, already_finalized on a second call.
  void finalize();
  bool finalized() const noexcept;

  int n_pes() const noexcept;
  int local_npes() const noexcept;
  PeId pe_base() const noexcept;
  const RuntimeConfig& config() const noexcept;
  const CostModel& cost_model() const noexcept;
  CutoverPolicy& cutover() noexcept;

  /// User heap bytes of a local PE, for inspection between runs.
  std::span<const std::byte> heap_bytes(PeId pe) const;
  const AccessTable& access_table(PeId pe) const;
  /// Messages ever sent through this node's ring.
  std::uint64_t ring_messages() const noexcept;

  detail::Node& node() noexcept { return *node_; }

 private:
  std::unique_ptr<detail::Node> node_;
};

}  // namespace pgas
