// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>

#include "node.hpp"
#include "pgas/runtime.hpp"

namespace pgas::detail {

/// Posts m on the node ring with a fresh completion slot. Blocking requests
/// wait and return the reply payload; non-blocking ones return 0 and are
/// reaped by quiet().
std::uint64_t submit(Context& ctx, RingMessage m, bool nbi);
/// Sends m on a blocking completion slot and returns the slot unwaited; the
/// caller owes a pool.wait on it.
std::uint16_t post(Context& ctx, RingMessage m);

/// Throws invalid_address unless [off, off + n) lies in the first `limit`
/// bytes of the heap.
void check_range(std::uint64_t off, std::size_t n, std::size_t limit);

/// The target PE's copy of a local symmetric address, or nullptr.
std::byte* direct_addr(Context& ctx, std::uint64_t off, PeId pe);

/// Sleeps out the modeled duration of a direct transfer begun at `start`.
inline void pace_direct(SteadyTime start, double seconds) {
  if (seconds > 0) pace_until(after(start, seconds));
}

inline SteadyTime now() { return std::chrono::steady_clock::now(); }

}  // namespace pgas::detail
