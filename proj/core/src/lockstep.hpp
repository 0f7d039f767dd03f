// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "pgas/bench.hpp"
#include "pgas/runtime.hpp"

namespace pgas::detail {

/// Measures a list of points with every local PE taking part. PE 0 drives
/// warm-up and trials; for each batch it publishes the iteration count and
/// all PEs run `body` that many times between two host-side barriers, so the
/// timed span covers the slowest PE.
struct Lockstep {
  std::size_t points = 0;
  int trials = kTrials;
  /// Consecutive points with equal ids have their trials interleaved.
  /// Empty measures every point on its own.
  std::vector<std::size_t> group;
  /// Within a group, only points with equal ids share warm-up counts.
  std::vector<std::size_t> share;
  Clock clock;
  /// Collective; runs once on every PE before the first point.
  std::function<void(Context&)> setup;
  /// Runs on PE 0 only while the others wait, e.g. to switch cutover modes.
  std::function<void(std::size_t point)> prepare;
  std::function<void(Context&, std::size_t point, std::uint64_t iterations)> body;
  std::function<void(std::size_t point, const Measurement&)> done;

  void run(Runtime& rt) const;
};

}  // namespace pgas::detail
