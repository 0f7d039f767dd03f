// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/work_group.hpp"

#include <algorithm>

#include "group_shared.hpp"
#include "pgas/error.hpp"

namespace pgas {

Range item_block(std::size_t n, int group_size, int item) noexcept {
  return items_block(n, group_size, item, item + 1);
}

Range items_block(std::size_t n, int group_size, int first, int last) noexcept {
  const auto g = static_cast<std::size_t>(std::max(group_size, 1));
  const std::size_t b = (n + g - 1) / g;
  const std::size_t begin = std::min(static_cast<std::size_t>(first) * b, n);
  const std::size_t end = std::min(static_cast<std::size_t>(last) * b, n);
  return {begin, std::max(begin, end)};
}

WorkGroup::WorkGroup(Context& ctx, detail::GroupShared& shared, int group_size, int lanes,
                     int lane)
    : ctx_(&ctx), shared_(&shared), group_size_(group_size), lanes_(lanes), lane_(lane) {
  first_item_ = static_cast<int>(static_cast<long long>(group_size) * lane / lanes);
  end_item_ = static_cast<int>(static_cast<long long>(group_size) * (lane + 1) / lanes);
}

void WorkGroup::barrier() {
  if (lanes_ > 1) shared_->bar.arrive_and_wait();
}

void WorkGroup::barrier_with(std::exception_ptr local_error) {
  const std::uint64_t seq = op_seq_++;
  if (lanes_ == 1) {
    if (local_error) std::rethrow_exception(local_error);
    return;
  }
  if (local_error) shared_->record(seq, local_error);
  shared_->bar.arrive_and_wait();
  if (auto e = shared_->lookup(seq)) std::rethrow_exception(e);
}

void WorkGroup::leader_then_barrier(const std::function<void()>& f) {
  std::exception_ptr err;
  if (leader()) {
    try {
      f();
    } catch (...) {
      err = std::current_exception();
    }
  }
  barrier_with(err);
}

void WorkGroup::check_arguments(std::uint64_t hash) {
  if (!shared_->validate || lanes_ == 1) return;
  shared_->hashes[static_cast<std::size_t>(lane_)] = hash;
  shared_->bar.arrive_and_wait();
  bool same = std::all_of(shared_->hashes.begin(), shared_->hashes.end(),
                          [&](std::uint64_t h) { return h == shared_->hashes[0]; });
  // Second rendezvous so nobody overwrites its hash while others still read.
  shared_->bar.arrive_and_wait();
  if (!same)
    throw Error(ErrorCode::collective_mismatch,
                "work-group lanes passed different arguments to a collective call");
}

std::uint64_t hash_args(std::initializer_list<std::uint64_t> values) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint64_t v : values) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

}  // namespace pgas
