// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pgas/types.hpp"

namespace pgas {

namespace detail {
struct TeamData;
}

/// An ordered subset of PEs. Handles are per PE; copies share the same sync
/// epoch. A default-constructed Team is the null team.
class Team {
 public:
  Team() = default;
  explicit Team(std::shared_ptr<detail::TeamData> d) : d_(std::move(d)) {}

  bool is_null() const noexcept { return d_ == nullptr; }
  explicit operator bool() const noexcept { return !is_null(); }

  int id() const;
  int size() const;
  int my_rank() const;
  PeId pe_of(int rank) const;
  /// -1 when pe is not a member.
  int rank_of(PeId pe) const;
  const std::vector<PeId>& members() const;

  detail::TeamData& data() const;

 private:
  std::shared_ptr<detail::TeamData> d_;
};

}  // namespace pgas
