// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "pgas/types.hpp"

namespace pgas {

/// Runtime bring-up parameters. Loaded from a `key = value` text file (see
/// parse_config) and overridable field by field.
struct RuntimeConfig {
  /// PEs hosted by this node. In a two-node world this is the local count.
  int npes = 1;
  /// Expected world size; 0 means "whatever the handshake reports".
  int world_npes = 0;
  std::size_t heap_size = std::size_t{1} << 20;
  std::size_t ring_capacity = 4096;
  std::size_t flow_control_interval = 64;

  Topology topology = Topology::same_tile;
  /// Dilation applied to the device cost model. 0 asks the bench driver to
  /// calibrate it against host copy bandwidth.
  double time_scale = 1.0;
  std::optional<double> engine_startup_us;
  /// 0 means unlimited.
  std::optional<double> engine_bw_cap_gbps;
  /// Per-work-item time to store one 4 KiB chunk; 0 disables direct pacing.
  std::optional<double> direct_throttle_ns;

  CutoverMode cutover_mode = CutoverMode::tuned;
  std::string cutover_table;

  InternodeRole internode_role = InternodeRole::standalone;
  std::string peer_endpoint;

  /// Threads that carry a work-group's items; 0 means hardware concurrency.
  int work_group_lanes = 0;

  bool validate = false;
  bool trace_wire = false;

  /// Throws Error(invalid_config) describing the first violated constraint.
  void check() const;
};

/// Parses `key = value` lines. Blank lines and `#` comments are ignored;
/// unknown keys are rejected. Sizes accept K/M/G (and KiB/MiB/GiB) suffixes.
RuntimeConfig parse_config(std::string_view text, RuntimeConfig base = {});

/// Applies one `key = value` setting on top of `cfg`.
void apply_setting(RuntimeConfig& cfg, std::string_view key, std::string_view value);

RuntimeConfig load_config_file(const std::filesystem::path& path, RuntimeConfig base = {});

/// Reads the file named by PGAS_SIM_CONFIG if set, then applies
/// PGAS_SIM_VALIDATE and PGAS_SIM_TRACE.
RuntimeConfig load_config_from_env(RuntimeConfig base = {});

std::string to_text(const RuntimeConfig& cfg);

std::uint64_t parse_size(std::string_view text);

}  // namespace pgas
