// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

#include "pgas/types.hpp"

namespace pgas {

/// Operation families with their own cutover thresholds.
enum class OpKind : std::uint8_t { rma, broadcast, fcollect, collect, reduce };

std::string_view to_string(OpKind op) noexcept;
std::optional<OpKind> parse_op_kind(std::string_view s) noexcept;

inline constexpr std::uint64_t kNeverEngine = std::numeric_limits<std::uint64_t>::max();

/// Picks Direct or Engine for a transfer. A threshold T means "Engine iff
/// size > T", so every policy is monotone in size by construction.
///
/// Sizes are bytes: the whole transfer for rma, the payload for broadcast,
/// and the per-PE contribution for fcollect and collect. Reductions always
/// compute with direct loads.
class CutoverPolicy {
 public:
  explicit CutoverPolicy(CutoverMode mode = CutoverMode::tuned) : mode_(mode) {}

  CutoverMode mode() const noexcept { return mode_; }
  void set_mode(CutoverMode m) noexcept { mode_ = m; }

  Path choose(OpKind op, std::uint64_t size_bytes, int group_size, int npes) const;
  /// Table entry when present, else the built-in default.
  std::uint64_t threshold(OpKind op, int group_size, int npes) const;

  /// rma: 4096 * P(G); broadcast: 4096 * P(G); fcollect and collect:
  /// npes * 4096 * P(G) - 1, with P(G) = 1 + log2(G)/8.
  static std::uint64_t default_threshold(OpKind op, int group_size, int npes);

  /// rma entries ignore npes; store them with npes = 0.
  void set_threshold(OpKind op, int group_size, int npes, std::uint64_t threshold);
  /// Replaces the table with `op group_size npes threshold` lines. Blank lines
  /// and '#' comments are skipped; "inf" means never switch to the engine.
  void load_table(std::string_view text);
  std::string table_text() const;
  bool has_entry(OpKind op, int group_size, int npes) const;
  std::size_t table_size() const noexcept { return table_.size(); }

 private:
  using Key = std::tuple<OpKind, int, int>;
  static Key key(OpKind op, int group_size, int npes) {
    return {op, group_size, op == OpKind::rma ? 0 : npes};
  }

  CutoverMode mode_;
  std::map<Key, std::uint64_t> table_;
};

}  // namespace pgas
