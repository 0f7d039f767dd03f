// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/collectives.hpp"

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "executor.hpp"
#include "pgas/copy.hpp"
#include "transfer.hpp"

namespace pgas {

namespace {

using detail::Node;
using detail::PeState;
using detail::TeamData;

// Either a work-group lane or a plain single-threaded caller.
struct Group {
  WorkGroup* wg = nullptr;

  int size() const { return wg ? wg->size() : 1; }
  bool leader() const { return !wg || wg->leader(); }
  Range block(std::size_t n) const { return wg ? wg->my_block(n) : Range{0, n}; }
  void check(std::uint64_t hash) const {
    if (wg) wg->check_arguments(hash);
  }
  void barrier() const {
    if (wg) wg->barrier();
  }
  void barrier_with(std::exception_ptr e) const {
    if (wg)
      wg->barrier_with(e);
    else if (e)
      std::rethrow_exception(e);
  }
  template <class F>
  void leader_then_barrier(F&& f) const {
    if (wg)
      wg->leader_then_barrier(f);
    else
      f();
  }
};

TeamData& member_data(const Context& ctx, const Team& team) {
  TeamData& td = team.data();
  if (td.my_rank < 0 || static_cast<std::size_t>(td.my_rank) >= td.members.size() ||
      td.members[static_cast<std::size_t>(td.my_rank)] != ctx.my_pe())
    throw Error(ErrorCode::invalid_team, "team handle does not belong to this PE");
  return td;
}

std::uint64_t* counter_at(std::byte* base, const TeamData& td) {
  return reinterpret_cast<std::uint64_t*>(base + td.psync.value + detail::kPsyncCounter);
}

void sync_impl(Context& ctx, TeamData& td) {
  Node& node = ctx.node();
  PeState& st = ctx.state();
  const auto size = static_cast<std::uint64_t>(td.members.size());
  const std::uint64_t epoch = ++td.epoch;
  const std::uint64_t off = td.psync.value + detail::kPsyncCounter;
  // Remote bumps are reaped before returning so none outlive the sync.
  std::uint16_t posted[CompletionPool::kSlots];
  std::size_t nposted = 0;
  // Start with the next rank so members do not all hit the same counter first.
  for (std::uint64_t k = 0; k < size; ++k) {
    const PeId m = td.members[(static_cast<std::uint64_t>(td.my_rank) + 1 + k) % size];
    if (std::byte* p = detail::direct_addr(ctx, off, m)) {
      const std::uint64_t now = std::atomic_ref<std::uint64_t>(*reinterpret_cast<std::uint64_t*>(p))
                                    .fetch_add(1, std::memory_order_seq_cst) + 1;
      // Waiters want a multiple of size; earlier bumps cannot satisfy them.
      if (now % size == 0) node.ring_doorbell(node.local_state(m));
    } else {
      RingMessage msg;
      msg.op = static_cast<std::uint8_t>(opcode::amo_base + static_cast<std::uint8_t>(AmoOp::add));
      msg.dtype = static_cast<std::uint8_t>(ElementType::u64);
      msg.dst_pe = static_cast<std::uint16_t>(m);
      msg.addr_a = off;
      msg.count = 1;
      msg.imm1 = 1;
      if (nposted == CompletionPool::kSlots) st.pool.wait(posted[--nposted]);
      posted[nposted++] = detail::post(ctx, msg);
    }
  }
  const std::uint64_t target = epoch * size;
  const std::uint64_t* mine = counter_at(ctx.heap_base(), td);
  node.wait_for(st, [&] {
    return race_load<std::uint64_t>(mine, std::memory_order_acquire) >= target;
  });
  for (std::size_t i = 0; i < nposted; ++i) st.pool.wait(posted[i]);
}

// Store one 64-bit word anywhere in pe's heap, internal tail included.
void put_word(Context& ctx, PeId pe, std::uint64_t off, std::uint64_t value) {
  if (std::byte* p = detail::direct_addr(ctx, off, pe)) {
    race_store(p, value, std::memory_order_release);
    ctx.node().ring_doorbell(ctx.node().local_state(pe));
    return;
  }
  RingMessage m;
  m.op = opcode::p;
  m.dtype = static_cast<std::uint8_t>(ElementType::u64);
  m.dst_pe = static_cast<std::uint16_t>(pe);
  m.addr_a = off;
  m.count = 1;
  m.imm1 = value;
  detail::submit(ctx, m, false);
}

RingMessage put_message(PeId pe, std::uint64_t off, const void* src, std::size_t n, bool engine) {
  RingMessage m;
  m.op = opcode::put;
  m.flags = msg_flag::local_token;
  if (engine) m.flags |= msg_flag::engine;
  m.dst_pe = static_cast<std::uint16_t>(pe);
  m.addr_a = off;
  m.addr_b = reinterpret_cast<std::uintptr_t>(src);
  m.count = n;
  return m;
}

// Copies src[r] to dest + off on pe: stores for direct peers, a non-blocking
// proxied put otherwise.
void push(Context& ctx, PeId pe, std::uint64_t off, const std::byte* src, std::size_t n) {
  if (n == 0) return;
  if (std::byte* p = detail::direct_addr(ctx, off, pe)) {
    race_copy(p, src, n);
    ctx.node().ring_doorbell(ctx.node().local_state(pe));
    return;
  }
  detail::submit(ctx, put_message(pe, off, src, n, false), true);
}

// Leader-only engine fan-out: one request per destination, then drain.
void engine_fanout(Context& ctx, const std::vector<PeId>& dests, std::uint64_t off,
                   const std::byte* src, std::size_t n) {
  for (PeId pe : dests) {
    const bool direct = ctx.is_direct(pe);
    detail::submit(ctx, put_message(pe, off, src, n, direct), true);
  }
  ctx.quiet();
}

double direct_cost(const Context& ctx, std::size_t n, int G, PeId from,
                   const std::vector<PeId>& dests) {
  double s = 0;
  for (PeId pe : dests)
    if (ctx.is_direct(pe)) s += ctx.cost_model().direct_seconds(n, G, from, pe);
  return s;
}

void check_user(const Context& ctx, SymmetricOffset off, std::size_t n) {
  detail::check_range(off.value, n, ctx.heap_size());
}

std::size_t elem_width(ElementType type) {
  if (!is_valid(type)) throw Error(ErrorCode::unsupported, "bad element type");
  return width(type);
}

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (b && a > SIZE_MAX / b) throw Error(ErrorCode::capacity, "collective size overflows");
  return a * b;
}

void exit_sync(Context& ctx, TeamData& td, const Group& g) {
  g.leader_then_barrier([&] {
    ctx.quiet();
    sync_impl(ctx, td);
  });
}

void entry_sync(Context& ctx, TeamData& td, const Group& g) {
  g.barrier();
  g.leader_then_barrier([&] { sync_impl(ctx, td); });
}

// ---- broadcast -------------------------------------------------------------

void broadcast_impl(Context& ctx, const Group& g, const Team& team, SymmetricOffset dest,
                    SymmetricOffset src, std::size_t nelems, ElementType type, int root) {
  TeamData& td = member_data(ctx, team);
  const std::size_t w = elem_width(type);
  const std::size_t bytes = checked_mul(nelems, w);
  g.check(hash_args({0xb0, dest.value, src.value, nelems, static_cast<std::uint64_t>(type),
                     static_cast<std::uint64_t>(root), static_cast<std::uint64_t>(td.id)}));
  const int size = static_cast<int>(td.members.size());
  if (root < 0 || root >= size)
    throw Error(ErrorCode::invalid_argument, "broadcast root " + std::to_string(root) +
                                                 " is not a team rank");
  check_user(ctx, dest, bytes);
  check_user(ctx, src, bytes);

  entry_sync(ctx, td, g);
  if (td.my_rank == root && bytes > 0) {
    const PeId me = ctx.my_pe();
    const std::byte* from = ctx.heap_base() + src.value;
    std::vector<PeId> others;
    for (PeId pe : td.members)
      if (pe != me) others.push_back(pe);
    const Path path = ctx.cutover().choose(OpKind::broadcast, bytes, g.size(), size);
    std::exception_ptr err;
    try {
      if (path == Path::engine) {
        g.leader_then_barrier([&] {
          race_copy(ctx.heap_base() + dest.value, from, bytes);
          engine_fanout(ctx, others, dest.value, from, bytes);
        });
      } else {
        auto start = detail::now();
        Range r = g.block(bytes);
        for (PeId pe : others)
          if (!ctx.is_direct(pe)) push(ctx, pe, dest.value + r.begin, from + r.begin, r.size());
        race_copy(ctx.heap_base() + dest.value + r.begin, from + r.begin, r.size());
        // Outer loop over address chunks, inner over destinations.
        constexpr std::size_t kChunk = 4096;
        for (std::size_t c = r.begin; c < r.end; c += kChunk) {
          std::size_t n = std::min(kChunk, r.end - c);
          for (PeId pe : others)
            if (std::byte* p = detail::direct_addr(ctx, dest.value + c, pe))
              race_copy(p, from + c, n);
        }
        Node& node = ctx.node();
        for (PeId pe : others)
          if (node.is_local(pe)) node.ring_doorbell(node.local_state(pe));
        detail::pace_direct(start, direct_cost(ctx, bytes, g.size(), me, others));
      }
    } catch (...) {
      err = std::current_exception();
    }
    g.barrier_with(err);
  }
  exit_sync(ctx, td, g);
}

// ---- fcollect / collect ----------------------------------------------------

// Pushes `bytes` from src to dest_off on every member, rotating the start so
// members do not all store into the same PE at once.
void push_all(Context& ctx, const Group& g, const TeamData& td, OpKind kind,
              std::uint64_t dest_off, const std::byte* src, std::size_t bytes) {
  const PeId me = ctx.my_pe();
  const std::size_t size = td.members.size();
  std::vector<PeId> order;
  for (std::size_t k = 0; k < size; ++k)
    order.push_back(td.members[(static_cast<std::size_t>(td.my_rank) + k) % size]);
  const Path path =
      bytes == 0 ? Path::direct
                 : ctx.cutover().choose(kind, bytes, g.size(), static_cast<int>(size));
  std::exception_ptr err;
  try {
    if (path == Path::engine) {
      g.leader_then_barrier([&] { engine_fanout(ctx, order, dest_off, src, bytes); });
      return;
    }
    auto start = detail::now();
    Range r = g.block(bytes);
    for (PeId pe : order) push(ctx, pe, dest_off + r.begin, src + r.begin, r.size());
    detail::pace_direct(start, direct_cost(ctx, bytes, g.size(), me, order));
  } catch (...) {
    err = std::current_exception();
  }
  g.barrier_with(err);
}

void fcollect_impl(Context& ctx, const Group& g, const Team& team, SymmetricOffset dest,
                   SymmetricOffset src, std::size_t nelems, ElementType type) {
  TeamData& td = member_data(ctx, team);
  const std::size_t w = elem_width(type);
  const std::size_t bytes = checked_mul(nelems, w);
  g.check(hash_args({0xfc, dest.value, src.value, nelems, static_cast<std::uint64_t>(type),
                     static_cast<std::uint64_t>(td.id)}));
  const std::size_t size = td.members.size();
  check_user(ctx, src, bytes);
  if (dest.value > ctx.heap_size() || checked_mul(bytes, size) > ctx.heap_size() - dest.value)
    throw Error(ErrorCode::capacity, "fcollect destination cannot hold " +
                                         std::to_string(size) + " x " + std::to_string(bytes) +
                                         " bytes");
  entry_sync(ctx, td, g);
  push_all(ctx, g, td, OpKind::fcollect,
           dest.value + static_cast<std::uint64_t>(td.my_rank) * bytes,
           ctx.heap_base() + src.value, bytes);
  exit_sync(ctx, td, g);
}

void collect_impl(Context& ctx, const Group& g, const Team& team, SymmetricOffset dest,
                  SymmetricOffset src, std::size_t my_nelems, ElementType type) {
  TeamData& td = member_data(ctx, team);
  const std::size_t w = elem_width(type);
  const std::size_t bytes = checked_mul(my_nelems, w);
  g.check(hash_args({0xc0, dest.value, src.value, my_nelems, static_cast<std::uint64_t>(type),
                     static_cast<std::uint64_t>(td.id)}));
  check_user(ctx, src, bytes);
  const std::size_t size = td.members.size();
  const std::uint64_t sizes_off = td.psync.value + detail::kPsyncSizes;

  entry_sync(ctx, td, g);
  // Size exchange: every member learns every contribution.
  g.leader_then_barrier([&] {
    for (PeId pe : td.members)
      put_word(ctx, pe, sizes_off + 8 * static_cast<std::uint64_t>(td.my_rank), my_nelems);
    ctx.quiet();
    sync_impl(ctx, td);
  });
  std::uint64_t before = 0, total = 0;
  for (std::size_t r = 0; r < size; ++r) {
    std::uint64_t n =
        race_load<std::uint64_t>(ctx.heap_base() + sizes_off + 8 * r, std::memory_order_acquire);
    if (r < static_cast<std::size_t>(td.my_rank)) before += n;
    total += n;
  }
  if (dest.value > ctx.heap_size() || total > (ctx.heap_size() - dest.value) / w) {
    // Every member reaches the same verdict; keep the epochs aligned first.
    exit_sync(ctx, td, g);
    throw Error(ErrorCode::capacity, "collect destination cannot hold " + std::to_string(total) +
                                         " elements");
  }
  push_all(ctx, g, td, OpKind::collect, dest.value + before * w, ctx.heap_base() + src.value,
           bytes);
  exit_sync(ctx, td, g);
}

// ---- reduce ----------------------------------------------------------------

template <class T>
T combine(ReduceOp op, T a, T b) {
  if constexpr (std::is_floating_point_v<T>) {
    switch (op) {
      case ReduceOp::min: return b < a ? b : a;
      case ReduceOp::max: return a < b ? b : a;
      case ReduceOp::sum: return a + b;
      case ReduceOp::prod: return a * b;
      default: break;
    }
    return a;
  } else {
    using U = std::make_unsigned_t<T>;
    // Promote narrow types so the multiply cannot overflow int.
    using W = std::conditional_t<(sizeof(U) < sizeof(unsigned)), unsigned, U>;
    const U ua = static_cast<U>(a), ub = static_cast<U>(b);
    switch (op) {
      case ReduceOp::min: return b < a ? b : a;
      case ReduceOp::max: return a < b ? b : a;
      case ReduceOp::sum: return static_cast<T>(static_cast<U>(W(ua) + W(ub)));
      case ReduceOp::prod: return static_cast<T>(static_cast<U>(W(ua) * W(ub)));
      case ReduceOp::bit_and: return static_cast<T>(ua & ub);
      case ReduceOp::bit_or: return static_cast<T>(ua | ub);
      case ReduceOp::bit_xor: return static_cast<T>(ua ^ ub);
    }
    return a;
  }
}

template <class T>
void fold_into(ReduceOp op, T* acc, const std::byte* in, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    T v;
    std::memcpy(&v, in + i * sizeof(T), sizeof(T));
    acc[i] = combine(op, acc[i], v);
  }
}

void reduce_impl(Context& ctx, const Group& g, const Team& team, SymmetricOffset dest,
                 SymmetricOffset src, std::size_t nelems, ElementType type, ReduceOp op) {
  TeamData& td = member_data(ctx, team);
  const std::size_t w = elem_width(type);
  if (!reduce_supports(op, type))
    throw Error(ErrorCode::unsupported, std::string(to_string(op)) + " is not defined for " +
                                            std::string(to_string(type)));
  const std::size_t bytes = checked_mul(nelems, w);
  g.check(hash_args({0x8e, dest.value, src.value, nelems, static_cast<std::uint64_t>(type),
                     static_cast<std::uint64_t>(op), static_cast<std::uint64_t>(td.id)}));
  check_user(ctx, dest, bytes);
  check_user(ctx, src, bytes);

  entry_sync(ctx, td, g);
  std::exception_ptr err;
  try {
    // Each lane owns a run of element indices and folds over members in
    // ascending rank order, reading their sources directly.
    const Range r = g.block(nelems);
    if (r.size()) {
      auto start = detail::now();
      const std::size_t n = r.size();
      std::vector<std::byte> acc(n * w), in(n * w);
      const std::uint64_t off = src.value + r.begin * w;
      double cost = 0;
      for (std::size_t k = 0; k < td.members.size(); ++k) {
        const PeId pe = td.members[k];
        std::byte* target = k == 0 ? acc.data() : in.data();
        if (const std::byte* p = detail::direct_addr(ctx, off, pe)) {
          race_copy(target, p, n * w);
          cost += ctx.cost_model().direct_seconds(bytes, g.size(), pe, ctx.my_pe());
        } else {
          RingMessage m = put_message(pe, off, target, n * w, false);
          m.op = opcode::get;
          detail::submit(ctx, m, false);
        }
        if (k == 0) continue;
        dispatch(type, [&](auto tag) {
          using T = typename decltype(tag)::type;
          fold_into<T>(op, reinterpret_cast<T*>(acc.data()), in.data(), n);
        });
      }
      race_copy(ctx.heap_base() + dest.value + r.begin * w, acc.data(), n * w);
      // Every lane finishes when the whole group would have.
      detail::pace_direct(start, cost);
    }
  } catch (...) {
    err = std::current_exception();
  }
  g.barrier_with(err);
  exit_sync(ctx, td, g);
}

}  // namespace

// ---- teams -----------------------------------------------------------------

Team team_split_strided(Context& ctx, const Team& parent, int start, int stride, int size) {
  TeamData& pd = member_data(ctx, parent);
  const int psize = static_cast<int>(pd.members.size());
  if (size < 1 || stride < 1 || start < 0 || start >= psize ||
      static_cast<long long>(start) + static_cast<long long>(size - 1) * stride >= psize)
    throw Error(ErrorCode::invalid_team, "split (start " + std::to_string(start) + ", stride " +
                                             std::to_string(stride) + ", size " +
                                             std::to_string(size) + ") does not fit a team of " +
                                             std::to_string(psize));
  PeState& st = ctx.state();
  Node& node = ctx.node();
  const std::uint64_t sizes_off = pd.psync.value + detail::kPsyncSizes;

  // Members may have joined different sub-teams so far; agree on the highest
  // internal cursor so the new sync block is unused everywhere.
  sync_impl(ctx, pd);
  const std::uint64_t cursor = st.heap->internal_cursor();
  for (PeId pe : pd.members)
    put_word(ctx, pe, sizes_off + 8 * static_cast<std::uint64_t>(pd.my_rank), cursor);
  ctx.quiet();
  sync_impl(ctx, pd);
  std::uint64_t block_at = 0;
  for (int r = 0; r < psize; ++r)
    block_at = std::max(block_at, race_load<std::uint64_t>(
                                      ctx.heap_base() + sizes_off + 8 * static_cast<std::uint64_t>(r),
                                      std::memory_order_acquire));
  sync_impl(ctx, pd);
  if (block_at + node.psync_block > st.heap->total_size())
    throw Error(ErrorCode::capacity, "no room for another team sync block");
  st.heap->set_internal_cursor(block_at + node.psync_block);

  const int rel = pd.my_rank - start;
  if (rel < 0 || rel % stride != 0 || rel / stride >= size) return Team{};
  auto td = std::make_shared<TeamData>();
  const std::uint64_t first = (node.heap_user + 63) / 64 * 64;
  td->id = static_cast<int>((block_at - first) / node.psync_block);
  for (int k = 0; k < size; ++k) td->members.push_back(pd.members[static_cast<std::size_t>(start + k * stride)]);
  td->my_rank = rel / stride;
  td->psync = SymmetricOffset{block_at};
  return Team(std::move(td));
}

void team_sync(Context& ctx, const Team& team) { sync_impl(ctx, member_data(ctx, team)); }

void sync_all(Context& ctx) { team_sync(ctx, ctx.team_world()); }

void barrier(Context& ctx, const Team& team) {
  TeamData& td = member_data(ctx, team);
  ctx.quiet();
  sync_impl(ctx, td);
}

void barrier_all(Context& ctx) { barrier(ctx, ctx.team_world()); }

void broadcast(Context& ctx, const Team& team, SymmetricOffset dest, SymmetricOffset src,
               std::size_t nelems, ElementType type, int root) {
  broadcast_impl(ctx, Group{}, team, dest, src, nelems, type, root);
}

void fcollect(Context& ctx, const Team& team, SymmetricOffset dest, SymmetricOffset src,
              std::size_t nelems, ElementType type) {
  fcollect_impl(ctx, Group{}, team, dest, src, nelems, type);
}

void collect(Context& ctx, const Team& team, SymmetricOffset dest, SymmetricOffset src,
             std::size_t my_nelems, ElementType type) {
  collect_impl(ctx, Group{}, team, dest, src, my_nelems, type);
}

void reduce(Context& ctx, const Team& team, SymmetricOffset dest, SymmetricOffset src,
            std::size_t nelems, ElementType type, ReduceOp op) {
  reduce_impl(ctx, Group{}, team, dest, src, nelems, type, op);
}

void broadcast_work_group(WorkGroup& wg, const Team& team, SymmetricOffset dest,
                          SymmetricOffset src, std::size_t nelems, ElementType type, int root) {
  broadcast_impl(wg.context(), Group{&wg}, team, dest, src, nelems, type, root);
}

void fcollect_work_group(WorkGroup& wg, const Team& team, SymmetricOffset dest,
                         SymmetricOffset src, std::size_t nelems, ElementType type) {
  fcollect_impl(wg.context(), Group{&wg}, team, dest, src, nelems, type);
}

void collect_work_group(WorkGroup& wg, const Team& team, SymmetricOffset dest,
                        SymmetricOffset src, std::size_t my_nelems, ElementType type) {
  collect_impl(wg.context(), Group{&wg}, team, dest, src, my_nelems, type);
}

void reduce_work_group(WorkGroup& wg, const Team& team, SymmetricOffset dest,
                       SymmetricOffset src, std::size_t nelems, ElementType type, ReduceOp op) {
  reduce_impl(wg.context(), Group{&wg}, team, dest, src, nelems, type, op);
}

void sync_all_work_group(WorkGroup& wg) {
  wg.barrier();
  wg.leader_then_barrier([&] { sync_all(wg.context()); });
}

void barrier_all_work_group(WorkGroup& wg) {
  wg.barrier();
  wg.leader_then_barrier([&] { barrier_all(wg.context()); });
}

}  // namespace pgas
