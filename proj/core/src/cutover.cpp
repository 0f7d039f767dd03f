// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/cutover.hpp"

#include <cmath>
#include <sstream>

#include "pgas/cost_model.hpp"

namespace pgas {

std::string_view to_string(OpKind op) noexcept {
  switch (op) {
    case OpKind::rma: return "rma";
    case OpKind::broadcast: return "broadcast";
    case OpKind::fcollect: return "fcollect";
    case OpKind::collect: return "collect";
    case OpKind::reduce: return "reduce";
  }
  return "invalid";
}

std::optional<OpKind> parse_op_kind(std::string_view s) noexcept {
  for (OpKind k : {OpKind::rma, OpKind::broadcast, OpKind::fcollect, OpKind::collect,
                   OpKind::reduce})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::uint64_t CutoverPolicy::default_threshold(OpKind op, int group_size, int npes) {
  const double per_item = 4096.0 * CostModel::parallelism(group_size);
  switch (op) {
    case OpKind::rma:
    case OpKind::broadcast:
      return static_cast<std::uint64_t>(std::llround(per_item));
    case OpKind::fcollect:
    case OpKind::collect:
      // Engine copies of a collect are serialized node-wide (npes^2 jobs)
      // while direct pushes run on every PE at once.
      return static_cast<std::uint64_t>(std::llround(per_item * std::max(npes, 1))) - 1;
    case OpKind::reduce:
      return kNeverEngine;
  }
  return kNeverEngine;
}

std::uint64_t CutoverPolicy::threshold(OpKind op, int group_size, int npes) const {
  if (op == OpKind::reduce) return kNeverEngine;
  if (auto it = table_.find(key(op, group_size, npes)); it != table_.end()) return it->second;
  return default_threshold(op, group_size, npes);
}

Path CutoverPolicy::choose(OpKind op, std::uint64_t size_bytes, int group_size, int npes) const {
  if (op == OpKind::reduce) return Path::direct;
  switch (mode_) {
    case CutoverMode::never: return Path::direct;
    case CutoverMode::always: return Path::engine;
    case CutoverMode::tuned: break;
  }
  return size_bytes > threshold(op, group_size, npes) ? Path::engine : Path::direct;
}

void CutoverPolicy::set_threshold(OpKind op, int group_size, int npes, std::uint64_t threshold) {
  if (group_size < 1) throw Error(ErrorCode::invalid_config, "cutover group_size must be >= 1");
  table_[key(op, group_size, npes)] = threshold;
}

bool CutoverPolicy::has_entry(OpKind op, int group_size, int npes) const {
  return table_.count(key(op, group_size, npes)) != 0;
}

void CutoverPolicy::load_table(std::string_view text) {
  std::map<Key, std::uint64_t> fresh;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string op_name, thr;
    long long g = 0, n = 0;
    if (!(ls >> op_name)) continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::invalid_config,
                  "cutover table line " + std::to_string(line_no) + ": " + why);
    };
    if (!(ls >> g >> n >> thr)) fail("expected 'op group_size npes threshold'");
    std::string extra;
    if (ls >> extra) fail("trailing text '" + extra + "'");
    auto op = parse_op_kind(op_name);
    if (!op) fail("unknown op '" + op_name + "'");
    if (g < 1 || n < 0) fail("group_size must be >= 1 and npes >= 0");
    std::uint64_t t = 0;
    if (thr == "inf") {
      t = kNeverEngine;
    } else {
      std::size_t pos = 0;
      try {
        t = std::stoull(thr, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != thr.size() || thr.empty() || thr[0] == '-') fail("bad threshold '" + thr + "'");
    }
    Key k = key(*op, static_cast<int>(g), static_cast<int>(n));
    auto [it, inserted] = fresh.emplace(k, t);
    if (!inserted && it->second != t) fail("conflicting duplicate entry");
  }
  table_ = std::move(fresh);
}

std::string CutoverPolicy::table_text() const {
  std::ostringstream os;
  for (const auto& [k, t] : table_) {
    os << to_string(std::get<0>(k)) << ' ' << std::get<1>(k) << ' ' << std::get<2>(k) << ' ';
    if (t == kNeverEngine)
      os << "inf";
    else
      os << t;
    os << '\n';
  }
  return os.str();
}

}  // namespace pgas
