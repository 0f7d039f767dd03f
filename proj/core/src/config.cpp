// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/config.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pgas {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorCode::invalid_config,
              std::string(key) + " = '" + std::string(value) + "': " + std::string(why));
}

long long parse_int(std::string_view key, std::string_view v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected an integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string s(v);
  char* end = nullptr;
  double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad(key, v, "expected a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  bad(key, v, "expected a boolean");
}

}  // namespace

std::uint64_t parse_size(std::string_view text) {
  std::string_view v = trim(text);
  std::size_t digits = 0;
  while (digits < v.size() && std::isdigit(static_cast<unsigned char>(v[digits]))) ++digits;
  if (digits == 0) throw Error(ErrorCode::invalid_config, "bad size '" + std::string(text) + "'");
  std::uint64_t n = 0;
  std::from_chars(v.data(), v.data() + digits, n);
  std::string_view suffix = trim(v.substr(digits));
  std::uint64_t mult = 1;
  if (suffix.empty() || suffix == "B") mult = 1;
  else if (suffix == "K" || suffix == "KiB" || suffix == "k") mult = std::uint64_t{1} << 10;
  else if (suffix == "M" || suffix == "MiB") mult = std::uint64_t{1} << 20;
  else if (suffix == "G" || suffix == "GiB") mult = std::uint64_t{1} << 30;
  else throw Error(ErrorCode::invalid_config, "bad size suffix '" + std::string(suffix) + "'");
  return n * mult;
}

void apply_setting(RuntimeConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "npes") {
    cfg.npes = static_cast<int>(parse_int(key, value));
  } else if (key == "world_npes") {
    cfg.world_npes = static_cast<int>(parse_int(key, value));
  } else if (key == "heap_size") {
    cfg.heap_size = parse_size(value);
  } else if (key == "ring_capacity") {
    cfg.ring_capacity = parse_size(value);
  } else if (key == "flow_control_interval") {
    cfg.flow_control_interval = parse_size(value);
  } else if (key == "topology") {
    auto t = parse_topology(value);
    if (!t) bad(key, value, "expected same_tile, cross_tile, cross_device or paired");
    cfg.topology = *t;
  } else if (key == "time_scale") {
    cfg.time_scale = parse_double(key, value);
  } else if (key == "engine_startup_us") {
    cfg.engine_startup_us = parse_double(key, value);
  } else if (key == "engine_bw_cap_gbps") {
    cfg.engine_bw_cap_gbps = parse_double(key, value);
  } else if (key == "direct_throttle_ns") {
    cfg.direct_throttle_ns = parse_double(key, value);
  } else if (key == "cutover_mode") {
    auto m = parse_cutover_mode(value);
    if (!m) bad(key, value, "expected never, always or tuned");
    cfg.cutover_mode = *m;
  } else if (key == "cutover_table") {
    cfg.cutover_table = std::string(value);
  } else if (key == "internode_role") {
    auto r = parse_internode_role(value);
    if (!r) bad(key, value, "expected standalone, node_a or node_b");
    cfg.internode_role = *r;
  } else if (key == "peer_endpoint") {
    cfg.peer_endpoint = std::string(value);
  } else if (key == "work_group_lanes") {
    cfg.work_group_lanes = static_cast<int>(parse_int(key, value));
  } else if (key == "validate") {
    cfg.validate = parse_bool(key, value);
  } else if (key == "trace_wire") {
    cfg.trace_wire = parse_bool(key, value);
  } else {
    bad(key, value, "unknown key");
  }
}

RuntimeConfig parse_config(std::string_view text, RuntimeConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::invalid_config,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

RuntimeConfig load_config_file(const std::filesystem::path& path, RuntimeConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

RuntimeConfig load_config_from_env(RuntimeConfig base) {
  if (const char* path = std::getenv("PGAS_SIM_CONFIG"); path && *path)
    base = load_config_file(path, std::move(base));
  if (const char* v = std::getenv("PGAS_SIM_VALIDATE"); v && std::string_view(v) == "1")
    base.validate = true;
  if (const char* v = std::getenv("PGAS_SIM_TRACE"); v && std::string_view(v) == "wire")
    base.trace_wire = true;
  return base;
}

void RuntimeConfig::check() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::invalid_config, why); };
  if (npes < 1) fail("npes must be >= 1");
  // Node-wide completion ids are 16 bits: local_pe * 256 + slot.
  if (npes > 256) fail("at most 256 PEs per node");
  if (world_npes < 0 || world_npes > 65535) fail("world_npes out of range");
  if (internode_role == InternodeRole::standalone && world_npes != 0 && world_npes != npes)
    fail("standalone world_npes must equal npes");
  if (heap_size == 0) fail("heap_size must be positive");
  if (ring_capacity < 2 || !std::has_single_bit(ring_capacity) ||
      ring_capacity > (std::size_t{1} << 30))
    fail("ring_capacity must be a power of two >= 2");
  if (flow_control_interval == 0) fail("flow_control_interval must be positive");
  if (work_group_lanes < 0) fail("work_group_lanes must be >= 0");
  if (time_scale < 0) fail("time_scale must be >= 0");
  if (engine_startup_us && *engine_startup_us < 0) fail("engine_startup_us must be >= 0");
  if (engine_bw_cap_gbps && *engine_bw_cap_gbps < 0) fail("engine_bw_cap_gbps must be >= 0");
  if (direct_throttle_ns && *direct_throttle_ns < 0) fail("direct_throttle_ns must be >= 0");
  if (internode_role != InternodeRole::standalone && peer_endpoint.empty())
    fail("internode roles need peer_endpoint");
}

std::string to_text(const RuntimeConfig& cfg) {
  std::ostringstream os;
  os << "npes = " << cfg.npes << '\n';
  if (cfg.world_npes) os << "world_npes = " << cfg.world_npes << '\n';
  os << "heap_size = " << cfg.heap_size << '\n'
     << "ring_capacity = " << cfg.ring_capacity << '\n'
     << "flow_control_interval = " << cfg.flow_control_interval << '\n'
     << "topology = " << to_string(cfg.topology) << '\n'
     << "time_scale = " << cfg.time_scale << '\n';
  if (cfg.engine_startup_us) os << "engine_startup_us = " << *cfg.engine_startup_us << '\n';
  if (cfg.engine_bw_cap_gbps) os << "engine_bw_cap_gbps = " << *cfg.engine_bw_cap_gbps << '\n';
  if (cfg.direct_throttle_ns) os << "direct_throttle_ns = " << *cfg.direct_throttle_ns << '\n';
  os << "cutover_mode = " << to_string(cfg.cutover_mode) << '\n';
  if (!cfg.cutover_table.empty()) os << "cutover_table = " << cfg.cutover_table << '\n';
  os << "internode_role = " << to_string(cfg.internode_role) << '\n';
  if (!cfg.peer_endpoint.empty()) os << "peer_endpoint = " << cfg.peer_endpoint << '\n';
  if (cfg.work_group_lanes) os << "work_group_lanes = " << cfg.work_group_lanes << '\n';
  if (cfg.validate) os << "validate = 1\n";
  if (cfg.trace_wire) os << "trace_wire = 1\n";
  return os.str();
}

}  // namespace pgas
