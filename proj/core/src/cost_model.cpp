// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <thread>

#ifdef __linux__
#include <sys/prctl.h>
#endif

namespace pgas {

LinkProfile base_profile(Topology link_class) noexcept {
  LinkProfile p;
  switch (link_class) {
    case Topology::same_tile:
      p.engine_startup = 4e-6;
      p.engine_bandwidth = 400e9;
      break;
    case Topology::cross_tile:
      p.engine_startup = 6e-6;
      p.engine_bandwidth = 300e9;
      break;
    case Topology::cross_device:
    case Topology::paired:
      p.engine_startup = 10e-6;
      p.engine_bandwidth = 200e9;
      break;
  }
  // A lone work-item pays roughly one engine startup per 4 KiB chunk, which
  // puts the single-item crossover at 4 KiB.
  p.direct_chunk = p.engine_startup + kDirectChunkBytes / p.engine_bandwidth;
  return p;
}

CostModel::CostModel(const RuntimeConfig& cfg)
    : scale_(cfg.time_scale > 0 ? cfg.time_scale : 1.0), topology_(cfg.topology) {
  const Topology classes[3] = {Topology::same_tile, Topology::cross_tile, Topology::cross_device};
  for (int i = 0; i < 3; ++i) {
    LinkProfile p = base_profile(classes[i]);
    if (cfg.engine_startup_us) p.engine_startup = *cfg.engine_startup_us * 1e-6;
    if (cfg.engine_bw_cap_gbps) p.engine_bandwidth = *cfg.engine_bw_cap_gbps * 1e9;
    if (cfg.direct_throttle_ns) p.direct_chunk = *cfg.direct_throttle_ns * 1e-9;
    p.engine_startup *= scale_;
    p.direct_chunk *= scale_;
    if (p.engine_bandwidth > 0) p.engine_bandwidth /= scale_;
    profiles_[i] = p;
  }
}

Topology CostModel::link_class(PeId from, PeId to) const noexcept {
  if (from == to) return Topology::same_tile;
  if (topology_ != Topology::paired) return topology_;
  return from / 2 == to / 2 ? Topology::cross_tile : Topology::cross_device;
}

const LinkProfile& CostModel::profile(Topology link_class) const noexcept {
  switch (link_class) {
    case Topology::same_tile: return profiles_[0];
    case Topology::cross_tile: return profiles_[1];
    default: return profiles_[2];
  }
}

double CostModel::parallelism(int group_size) noexcept {
  return 1.0 + std::log2(static_cast<double>(std::max(group_size, 1))) / 8.0;
}

double CostModel::direct_seconds(std::size_t bytes, int group_size, PeId from,
                                 PeId to) const noexcept {
  const LinkProfile& p = link(from, to);
  return static_cast<double>(bytes) / kDirectChunkBytes * p.direct_chunk / parallelism(group_size);
}

double CostModel::engine_seconds(std::size_t bytes, PeId from, PeId to) const noexcept {
  const LinkProfile& p = link(from, to);
  double t = p.engine_startup;
  if (p.engine_bandwidth > 0) t += static_cast<double>(bytes) / p.engine_bandwidth;
  return t;
}

void pace_until(SteadyTime deadline) {
  using namespace std::chrono;
#ifdef __linux__
  // The default 50 us timer slack would swamp the short sleeps used here.
  thread_local bool slack_set = [] {
    prctl(PR_SET_TIMERSLACK, 1UL, 0UL, 0UL, 0UL);
    return true;
  }();
  (void)slack_set;
#endif
  for (;;) {
    auto now = steady_clock::now();
    if (now >= deadline) return;
    auto rem = deadline - now;
    if (rem > 40us)
      std::this_thread::sleep_for(std::min<steady_clock::duration>(rem - 20us, 500us));
    else
      std::this_thread::yield();
  }
}

double measure_host_copy_bandwidth(std::size_t bytes) {
  auto src = std::make_unique<std::byte[]>(bytes);
  auto dst = std::make_unique<std::byte[]>(bytes);
  std::memset(src.get(), 1, bytes);
  std::memset(dst.get(), 2, bytes);
  double best = 0;
  for (int i = 0; i < 5; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    std::memcpy(dst.get(), src.get(), bytes);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > 0) best = std::max(best, static_cast<double>(bytes) / s);
  }
  return best;
}

double calibrate_time_scale(double host_bandwidth) noexcept {
  if (!(host_bandwidth > 0)) return 40.0;
  return std::clamp(400e9 / (1.5 * host_bandwidth), 8.0, 40.0);
}

}  // namespace pgas
