// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "pgas/runtime.hpp"
#include "pgas/team.hpp"
#include "pgas/types.hpp"
#include "pgas/work_group.hpp"

namespace pgas {

// Team collectives. Every member calls with the same arguments in the same
// order; ranks are team ranks. Source and destination buffers are symmetric
// and must not overlap.

/// Members parent[start + k*stride] for k < size. Non-members get the null
/// team. Called by every parent member. Throws invalid_team on bad geometry.
Team team_split_strided(Context& ctx, const Team& parent, int start, int stride, int size);

/// Each member bumps every member's sync counter, then waits for its own to
/// reach epoch * size. No quiet.
void team_sync(Context& ctx, const Team& team);
void sync_all(Context& ctx);
/// quiet() followed by team_sync.
void barrier(Context& ctx, const Team& team);
void barrier_all(Context& ctx);

/// The root pushes its src into every member's dest.
void broadcast(Context& ctx, const Team& team, SymmetricOffset dest, SymmetricOffset src,
               std::size_t nelems, ElementType type, int root);
/// Member r's nelems elements land at dest + r*nelems on every member.
void fcollect(Context& ctx, const Team& team, SymmetricOffset dest, SymmetricOffset src,
              std::size_t nelems, ElementType type);
/// Like fcollect with per-member counts; contributions are packed in rank order.
void collect(Context& ctx, const Team& team, SymmetricOffset dest, SymmetricOffset src,
             std::size_t my_nelems, ElementType type);
/// Every member folds all members' src in ascending rank order into its own
/// dest, so floating-point results are identical everywhere.
void reduce(Context& ctx, const Team& team, SymmetricOffset dest, SymmetricOffset src,
            std::size_t nelems, ElementType type, ReduceOp op);

void broadcast_work_group(WorkGroup& wg, const Team& team, SymmetricOffset dest,
                          SymmetricOffset src, std::size_t nelems, ElementType type, int root);
void fcollect_work_group(WorkGroup& wg, const Team& team, SymmetricOffset dest,
                         SymmetricOffset src, std::size_t nelems, ElementType type);
void collect_work_group(WorkGroup& wg, const Team& team, SymmetricOffset dest,
                        SymmetricOffset src, std::size_t my_nelems, ElementType type);
void reduce_work_group(WorkGroup& wg, const Team& team, SymmetricOffset dest,
                       SymmetricOffset src, std::size_t nelems, ElementType type, ReduceOp op);

/// The leader runs the PE-level call between two group barriers.
void sync_all_work_group(WorkGroup& wg);
void barrier_all_work_group(WorkGroup& wg);

}  // namespace pgas
