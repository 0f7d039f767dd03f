// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/tuner.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "lockstep.hpp"
#include "pgas/collectives.hpp"
#include "pgas/rma.hpp"

namespace pgas {

namespace {

struct Point {
  int group;
  int npes;
  std::uint64_t size;
  CutoverMode mode;
};

}  // namespace

CutoverPolicy measure_cutover(Runtime& rt, const CutoverSweep& sweep, const Clock& clock) {
  if (sweep.op == OpKind::reduce)
    throw Error(ErrorCode::invalid_argument, "reduce always takes the direct path");
  std::vector<std::uint64_t> sizes = sweep.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 2 || sizes.front() == 0)
    throw Error(ErrorCode::insufficient_samples, "need at least two nonzero sizes");
  if (sweep.group_sizes.empty())
    throw Error(ErrorCode::insufficient_samples, "no group sizes");
  const bool rma = sweep.op == OpKind::rma;
  std::vector<int> team_sizes = rma ? std::vector<int>{2} : sweep.npes;
  if (team_sizes.empty()) throw Error(ErrorCode::insufficient_samples, "no team sizes");
  for (int k : team_sizes)
    if (k < 1 || k > rt.n_pes() || (rma && rt.n_pes() < 2))
      throw Error(ErrorCode::insufficient_samples,
                  "team of " + std::to_string(k) + " PEs in a world of " +
                      std::to_string(rt.n_pes()));

  std::vector<Point> points;
  for (int g : sweep.group_sizes)
    for (int k : team_sizes)
      for (auto s : sizes)
        for (CutoverMode m : {CutoverMode::never, CutoverMode::always}) points.push_back({g, k, s, m});

  const std::uint64_t max_size = sizes.back();
  int max_team = *std::max_element(team_sizes.begin(), team_sizes.end());
  SymmetricOffset src, dst;
  std::vector<std::byte> local(max_size);
  std::vector<std::map<int, Team>> teams(static_cast<std::size_t>(rt.n_pes()));
  std::vector<double> seconds(points.size());

  detail::Lockstep ls;
  ls.points = points.size();
  ls.trials = sweep.trials;
  ls.clock = clock;
  ls.setup = [&](Context& ctx) {
    src = ctx.symm_alloc(max_size);
    dst = ctx.symm_alloc(rma ? max_size : max_size * static_cast<std::uint64_t>(max_team));
    if (!rma) {
      auto& mine = teams[static_cast<std::size_t>(ctx.my_pe())];
      for (int k : team_sizes) mine[k] = team_split_strided(ctx, ctx.team_world(), 0, 1, k);
    }
  };
  ls.prepare = [&](std::size_t p) { rt.cutover().set_mode(points[p].mode); };
  ls.body = [&](Context& ctx, std::size_t p, std::uint64_t n) {
    const Point& pt = points[p];
    if (rma) {
      if (ctx.my_pe() != 0) return;
      ctx.work_group(pt.group, [&](WorkGroup& wg) {
        for (std::uint64_t i = 0; i < n; ++i)
          put_work_group(wg, dst, ctx.local(src), pt.size, 1);
      });
      return;
    }
    const Team& team = teams[static_cast<std::size_t>(ctx.my_pe())][pt.npes];
    if (team.is_null()) return;
    ctx.work_group(pt.group, [&](WorkGroup& wg) {
      for (std::uint64_t i = 0; i < n; ++i) {
        switch (sweep.op) {
          case OpKind::broadcast:
            broadcast_work_group(wg, team, dst, src, pt.size, ElementType::u8, 0);
            break;
          case OpKind::fcollect:
            fcollect_work_group(wg, team, dst, src, pt.size, ElementType::u8);
            break;
          default:
            collect_work_group(wg, team, dst, src, pt.size, ElementType::u8);
            break;
        }
      }
    });
  };
  ls.done = [&](std::size_t p, const Measurement& m) {
    seconds[p] = m.best_seconds / static_cast<double>(m.iterations);
  };

  const CutoverMode saved = rt.cutover().mode();
  try {
    ls.run(rt);
  } catch (...) {
    rt.cutover().set_mode(saved);
    throw;
  }
  rt.cutover().set_mode(saved);

  CutoverPolicy out(CutoverMode::tuned);
  std::size_t i = 0;
  for (int g : sweep.group_sizes) {
    for (int k : team_sizes) {
      // Scan from the largest size down while the engine keeps winning.
      std::uint64_t threshold = kNeverEngine;
      for (std::size_t s = sizes.size(); s-- > 0;) {
        const double direct = seconds[i + 2 * s];
        const double engine = seconds[i + 2 * s + 1];
        if (!(engine < direct)) break;
        threshold = sizes[s] - 1;
      }
      out.set_threshold(sweep.op, g, rma ? 0 : k, threshold);
      i += 2 * sizes.size();
    }
  }
  return out;
}

}  // namespace pgas
