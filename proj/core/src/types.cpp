// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/types.hpp"

#include <array>

namespace pgas {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::runtime_busy: return "runtime_busy";
    case ErrorCode::heap_exhausted: return "heap_exhausted";
    case ErrorCode::invalid_address: return "invalid_address";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::misaligned: return "misaligned";
    case ErrorCode::send_after_shutdown: return "send_after_shutdown";
    case ErrorCode::remote_failure: return "remote_failure";
    case ErrorCode::link_failure: return "link_failure";
    case ErrorCode::geometry_mismatch: return "geometry_mismatch";
    case ErrorCode::protocol: return "protocol";
    case ErrorCode::pending_operations: return "pending_operations";
    case ErrorCode::already_finalized: return "already_finalized";
    case ErrorCode::invalid_team: return "invalid_team";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::collective_mismatch: return "collective_mismatch";
    case ErrorCode::io: return "io";
    case ErrorCode::insufficient_samples: return "insufficient_samples";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::string_view, 10> kElementNames = {"i8",  "i16", "i32", "i64", "u8",
                                                            "u16", "u32", "u64", "f32", "f64"};
constexpr std::array<std::string_view, kAmoOpCount> kAmoNames = {
    "fetch",   "set",    "swap",    "compare_swap", "inc",      "add",      "fetch_inc",
    "fetch_add", "and",  "or",      "xor",          "fetch_and", "fetch_or", "fetch_xor"};
constexpr std::array<std::string_view, 7> kReduceNames = {"min", "max", "sum", "prod",
                                                          "and", "or",  "xor"};

}  // namespace

std::string_view to_string(ElementType t) noexcept {
  auto i = static_cast<std::size_t>(t);
  return i < kElementNames.size() ? kElementNames[i] : "invalid";
}

std::string_view to_string(AmoOp op) noexcept {
  auto i = static_cast<std::size_t>(op);
  return i < kAmoNames.size() ? kAmoNames[i] : "invalid";
}

std::string_view to_string(ReduceOp op) noexcept {
  auto i = static_cast<std::size_t>(op);
  return i < kReduceNames.size() ? kReduceNames[i] : "invalid";
}

std::string_view to_string(Path p) noexcept { return p == Path::direct ? "direct" : "engine"; }

std::string_view to_string(CutoverMode m) noexcept {
  switch (m) {
    case CutoverMode::never: return "never";
    case CutoverMode::always: return "always";
    case CutoverMode::tuned: return "tuned";
  }
  return "invalid";
}

std::string_view to_string(Topology t) noexcept {
  switch (t) {
    case Topology::same_tile: return "same_tile";
    case Topology::cross_tile: return "cross_tile";
    case Topology::cross_device: return "cross_device";
    case Topology::paired: return "paired";
  }
  return "invalid";
}

std::string_view to_string(InternodeRole r) noexcept {
  switch (r) {
    case InternodeRole::standalone: return "standalone";
    case InternodeRole::node_a: return "node_a";
    case InternodeRole::node_b: return "node_b";
  }
  return "invalid";
}

std::optional<ElementType> parse_element_type(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kElementNames.size(); ++i)
    if (kElementNames[i] == s) return static_cast<ElementType>(i);
  return std::nullopt;
}

std::optional<CutoverMode> parse_cutover_mode(std::string_view s) noexcept {
  // cutover_current is the name the original patch set used for tuned.
  if (s == "never" || s == "cutover_never") return CutoverMode::never;
  if (s == "always" || s == "cutover_always") return CutoverMode::always;
  if (s == "tuned" || s == "cutover_current") return CutoverMode::tuned;
  return std::nullopt;
}

std::optional<Topology> parse_topology(std::string_view s) noexcept {
  if (s == "same_tile") return Topology::same_tile;
  if (s == "cross_tile") return Topology::cross_tile;
  if (s == "cross_device") return Topology::cross_device;
  if (s == "paired") return Topology::paired;
  return std::nullopt;
}

std::optional<InternodeRole> parse_internode_role(std::string_view s) noexcept {
  if (s == "standalone") return InternodeRole::standalone;
  if (s == "node_a") return InternodeRole::node_a;
  if (s == "node_b") return InternodeRole::node_b;
  return std::nullopt;
}

}  // namespace pgas
