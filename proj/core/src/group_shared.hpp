// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <barrier>
#include <cstdint>
#include <deque>
#include <exception>
#include <mutex>
#include <utility>
#include <vector>

namespace pgas::detail {

/// State shared by the lanes of one work-group launch.
struct GroupShared {
  explicit GroupShared(int lanes, bool validate_args)
      : bar(lanes), hashes(static_cast<std::size_t>(lanes)), validate(validate_args) {}

  void record(std::uint64_t seq, std::exception_ptr e) {
    std::lock_guard lk(mu);
    for (auto& [s, err] : errors)
      if (s == seq) return;
    errors.emplace_back(seq, std::move(e));
    while (errors.size() > 8) errors.pop_front();
  }

  std::exception_ptr lookup(std::uint64_t seq) {
    std::lock_guard lk(mu);
    for (auto& [s, err] : errors)
      if (s == seq) return err;
    return nullptr;
  }

  std::barrier<> bar;
  std::vector<std::uint64_t> hashes;
  bool validate;
  std::mutex mu;
  std::deque<std::pair<std::uint64_t, std::exception_ptr>> errors;
};

}  // namespace pgas::detail
