// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Hooks for tests and diagnostics. Not part of the stable API.
#pragma once

#include <cstddef>
#include <cstdint>

#include "pgas/runtime.hpp"

namespace pgas::testing {

/// Posts a nop request whose reply payload is `payload` and returns its
/// completion slot without waiting.
std::uint16_t send_nop(Context& ctx, std::uint64_t payload);
/// Waits for a slot from send_nop and returns its payload.
std::uint64_t wait_slot(Context& ctx, std::uint16_t slot);
/// Makes the proxy hold up to `window` nop requests and complete them in a
/// seeded random order. 0 restores FIFO completion.
void set_proxy_reorder(Runtime& rt, std::size_t window, std::uint64_t seed);
/// Nops the proxy has completed out of arrival order so far.
std::uint64_t proxy_reordered(Runtime& rt);

}  // namespace pgas::testing
