// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>

namespace pgas {

class Context;

namespace detail {
struct GroupShared;
}

/// Half-open range.
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Item i of a G-item group owns [i*b, min((i+1)*b, n)) with b = ceil(n/G).
Range item_block(std::size_t n, int group_size, int item) noexcept;
/// Union of the blocks of items [first, last).
Range items_block(std::size_t n, int group_size, int first, int last) noexcept;

/// One lane's view of a work-group. A group of G logical work-items runs on
/// L = min(G, lanes) threads; each lane acts for a contiguous run of items.
/// Work-group calls must be made by every lane with identical arguments.
class WorkGroup {
 public:
  int size() const noexcept { return group_size_; }
  int lane() const noexcept { return lane_; }
  int lanes() const noexcept { return lanes_; }
  int first_item() const noexcept { return first_item_; }
  int end_item() const noexcept { return end_item_; }
  /// The lane that owns item 0 acts as the group leader.
  bool leader() const noexcept { return lane_ == 0; }
  Context& context() const noexcept { return *ctx_; }

  /// Group-wide rendezvous across lanes.
  void barrier();

  /// This lane's slice of an n-byte (or n-element) collaborative operation.
  Range my_block(std::size_t n) const noexcept {
    return items_block(n, group_size_, first_item_, end_item_);
  }

  /// Runs f on the leader only, then meets the other lanes at a barrier. An
  /// exception from f is rethrown on every lane.
  void leader_then_barrier(const std::function<void()>& f);
  /// Barrier that also rethrows on every lane when any lane passed an error.
  void barrier_with(std::exception_ptr local_error);

  /// With validation on, checks that every lane passed the same hash and
  /// throws collective_mismatch on all lanes otherwise.
  void check_arguments(std::uint64_t hash);

 private:
  friend class Context;
  WorkGroup(Context& ctx, detail::GroupShared& shared, int group_size, int lanes, int lane);

  Context* ctx_;
  detail::GroupShared* shared_;
  int group_size_;
  int lanes_;
  int lane_;
  int first_item_;
  int end_item_;
  std::uint64_t op_seq_ = 0;
};

/// FNV-1a style mixing for argument validation.
std::uint64_t hash_args(std::initializer_list<std::uint64_t> values) noexcept;

}  // namespace pgas
