// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>

#include "pgas/config.hpp"
#include "pgas/types.hpp"

namespace pgas {

using SteadyTime = std::chrono::steady_clock::time_point;

/// Timing parameters of one link class, already dilated.
struct LinkProfile {
  /// Seconds before the copy engine moves its first byte.
  double engine_startup = 0;
  /// Engine bytes per second; 0 means unlimited.
  double engine_bandwidth = 0;
  /// Seconds one work-item needs to store a 4 KiB chunk; 0 disables pacing.
  double direct_chunk = 0;
};

/// Undilated device figures for the three link classes.
LinkProfile base_profile(Topology link_class) noexcept;

inline constexpr double kDirectChunkBytes = 4096.0;

/// Simulated device timing. Time is dilated by `time_scale`: startups are
/// multiplied by it and bandwidths divided by it, so every crossover point
/// is independent of the scale.
class CostModel {
 public:
  CostModel() : CostModel(RuntimeConfig{}) {}
  explicit CostModel(const RuntimeConfig& cfg);

  double time_scale() const noexcept { return scale_; }
  Topology topology() const noexcept { return topology_; }

  /// same_tile for self; for `paired`, PEs 2k and 2k+1 are cross_tile and
  /// everything else cross_device; otherwise the configured class.
  Topology link_class(PeId from, PeId to) const noexcept;
  const LinkProfile& profile(Topology link_class) const noexcept;
  const LinkProfile& link(PeId from, PeId to) const noexcept {
    return profile(link_class(from, to));
  }

  /// Collaborative stores by `group_size` work-items.
  double direct_seconds(std::size_t bytes, int group_size, PeId from, PeId to) const noexcept;
  double engine_seconds(std::size_t bytes, PeId from, PeId to) const noexcept;

  /// Speedup of a G-item group over a single item: 1 + log2(G)/8.
  static double parallelism(int group_size) noexcept;

 private:
  double scale_ = 1.0;
  Topology topology_ = Topology::same_tile;
  std::array<LinkProfile, 3> profiles_{};
};

/// Sleeps and then yields until `deadline`. Coarse sleeps leave a small
/// margin so the tail is accurate to a few microseconds.
void pace_until(SteadyTime deadline);

inline SteadyTime after(SteadyTime t, double seconds) {
  return t + std::chrono::duration_cast<SteadyTime::duration>(
                 std::chrono::duration<double>(seconds));
}

/// Best-of-several single-thread copy rate of a large buffer, bytes/s.
double measure_host_copy_bandwidth(std::size_t bytes = std::size_t{32} << 20);

/// Dilation that brings the slowest engine profile under the host copy rate:
/// clamp(400e9 / (1.5 * host_bw), 8, 40).
double calibrate_time_scale(double host_bandwidth) noexcept;

}  // namespace pgas
