// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "pgas/bench.hpp"
#include "pgas/cutover.hpp"
#include "pgas/runtime.hpp"

namespace pgas {

struct CutoverSweep {
  OpKind op = OpKind::rma;
  std::vector<int> group_sizes{1};
  /// Team sizes for collectives; rma always runs PE 0 -> PE 1.
  std::vector<int> npes{2};
  /// Bytes: message size for rma, per-PE contribution for collectives.
  std::vector<std::uint64_t> sizes;
  int trials = 3;
};

/// Times never against always at every sweep point and returns a tuned
/// policy whose table holds, per (G, npes), the largest size that should
/// stay Direct: engine is chosen from the smallest size where it wins there
/// and at every larger size. kNeverEngine when it never does. The runtime's
/// mode is restored afterwards. Must not be called inside Runtime::run.
/// Throws insufficient_samples with fewer than two sizes or a team larger than
/// the world, invalid_argument for reduce (always Direct).
CutoverPolicy measure_cutover(Runtime& rt, const CutoverSweep& sweep,
                              const Clock& clock = steady_clock_seconds());

}  // namespace pgas
