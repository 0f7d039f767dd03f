// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgas/config.hpp"
#include "pgas/types.hpp"

namespace pgas {

/// Monotonic seconds. Injected so tests can drive the protocol with a fake.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

inline constexpr double kWarmupSeconds = 2e-3;
inline constexpr std::uint64_t kMaxIterations = std::uint64_t{1} << 24;
inline constexpr int kTrials = 10;

/// Runs batch(1), batch(2), batch(4), ... and returns the first batch size
/// whose elapsed time exceeds 2 ms (or the 2^24 cap).
std::uint64_t warmup(const Clock& clock, const std::function<void(std::uint64_t)>& batch);

struct Measurement {
  std::uint64_t iterations = 0;
  std::vector<double> trials;
  /// Minimum over trials.
  double best_seconds = 0;
};

/// Warm-up, then `trials` timed batches of the warm-up size.
Measurement measure(const Clock& clock, const std::function<void(std::uint64_t)>& batch,
                    int trials = kTrials);

/// Several series measured side by side: each is warmed up on its own, then
/// trial t of every series runs before trial t+1 of any (odd rounds in
/// reverse order), so slow spells on the host land on all of them alike.
/// A series whose warm-up count is within 2x of another's with the same
/// `share` id (all, if empty) runs the larger of the two. Each result has the
/// shape measure() reports for one series.
std::vector<Measurement> measure_interleaved(
    const Clock& clock, const std::vector<std::function<void(std::uint64_t)>>& batches,
    int trials = kTrials, const std::vector<std::size_t>& share = {});

/// One CSV row. `size` is bytes for RMA suites and elements for collectives.
/// bandwidth = bytes moved per iteration * iterations / best_seconds;
/// latency_us = best_seconds / iterations * 1e6.
struct BenchRecord {
  std::string op;
  std::string topology;
  std::string mode;
  int work_items = 1;
  int npes = 1;
  std::uint64_t size = 0;
  std::uint64_t iterations = 0;
  double best_seconds = 0;
  double bandwidth = 0;
  double latency_us = 0;
  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

BenchRecord make_record(std::string op, std::string topology, std::string mode, int work_items,
                        int npes, std::uint64_t size, std::uint64_t bytes_per_iteration,
                        const Measurement& m);

inline constexpr std::string_view kCsvHeader =
    "op,topology,mode,work_items,npes,size,iterations,best_seconds,bandwidth,latency_us";

std::string to_csv(const std::vector<BenchRecord>& records);
/// Throws io on schema or value errors.
std::vector<BenchRecord> parse_csv(std::string_view text);
/// Overwrites path.
void write_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
/// Appends rows, writing the header first when the file is new or empty.
void append_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);

struct SuiteOptions {
  /// c1, c2 or c3.
  std::string suite;
  RuntimeConfig base;
  /// Restricts every series to one cutover mode.
  std::optional<CutoverMode> mode;
  /// c1: a single profile instead of all three; c2: default cross_device;
  /// c3: default paired.
  std::optional<Topology> topology;
  /// Overrides the default sweeps; empty keeps them.
  std::vector<std::uint64_t> sizes;
  std::vector<int> group_sizes;
  std::vector<int> npes;
  bool include_broadcast = true;
  int trials = kTrials;
  Clock clock = steady_clock_seconds();
  /// Called as each point finishes.
  std::function<void(const BenchRecord&)> on_record;
};

/// PEs a suite needs: 2 for c1 and c2, 12 for c3 (or the largest npes given).
int suite_min_pes(const SuiteOptions& opts);

/// Builds one standalone runtime per topology the suite needs and measures
/// every point. Throws geometry_mismatch when base.npes is too small or the
/// config is not standalone, invalid_config for an unknown suite.
std::vector<BenchRecord> run_suite(const SuiteOptions& opts);

/// log2 sweep [lo, hi].
std::vector<std::uint64_t> pow2_range(std::uint64_t lo, std::uint64_t hi);

}  // namespace pgas
