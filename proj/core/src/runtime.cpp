// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/runtime.hpp"

#include <algorithm>
#include <fstream>
#include <latch>
#include <sstream>
#include <string>
#include <thread>

#include "group_shared.hpp"
#include "link.hpp"
#include "node.hpp"
#include "proxy.hpp"

namespace pgas {

namespace {

std::atomic<bool> g_standalone_live{false};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read cutover table '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// ---- Team ----------------------------------------------------------------

detail::TeamData& Team::data() const {
  if (!d_) throw Error(ErrorCode::invalid_team, "operation on the null team");
  return *d_;
}
int Team::id() const { return data().id; }
int Team::size() const { return static_cast<int>(data().members.size()); }
int Team::my_rank() const { return data().my_rank; }
PeId Team::pe_of(int rank) const {
  const auto& m = data().members;
  if (rank < 0 || static_cast<std::size_t>(rank) >= m.size())
    throw Error(ErrorCode::invalid_argument, "team rank " + std::to_string(rank) + " out of range");
  return m[static_cast<std::size_t>(rank)];
}
int Team::rank_of(PeId pe) const {
  const auto& m = data().members;
  auto it = std::find(m.begin(), m.end(), pe);
  return it == m.end() ? -1 : static_cast<int>(it - m.begin());
}
const std::vector<PeId>& Team::members() const { return data().members; }

namespace detail {

// ---- Node ----------------------------------------------------------------

Node::Node(RuntimeConfig config) : cfg(std::move(config)), cost(cfg), policy(cfg.cutover_mode) {
  cfg.check();
  if (!cfg.cutover_table.empty()) policy.load_table(read_file(cfg.cutover_table));

  npes_local = cfg.npes;
  heap_user = cfg.heap_size;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  lanes_default = cfg.work_group_lanes > 0 ? cfg.work_group_lanes : static_cast<int>(hw);

  if (cfg.internode_role == InternodeRole::standalone) {
    world = npes_local;
    if (cfg.world_npes != 0 && cfg.world_npes != world)
      throw Error(ErrorCode::geometry_mismatch,
                  "world_npes = " + std::to_string(cfg.world_npes) + " but only " +
                      std::to_string(world) + " PEs are hosted and no peer node is configured");
  } else {
    link = Link::establish(cfg, npes_local, heap_user);
    pe_base = link->my_pe_base();
    world = link->world();
  }
  psync_block = psync_block_bytes(world);
  const std::size_t internal = psync_block * (kMaxTeams + 2);

  // Phase 1: every PE brings up its own heap; bases are exchanged at the latch.
  pes.resize(static_cast<std::size_t>(npes_local));
  std::vector<std::uintptr_t> bases(static_cast<std::size_t>(world), 0);
  {
    std::latch ready(npes_local);
    std::vector<std::exception_ptr> errors(pes.size());
    std::vector<std::thread> threads;
    for (int i = 0; i < npes_local; ++i) {
      threads.emplace_back([&, i] {
        try {
          auto st = std::make_unique<PeState>();
          st->pe = pe_base + i;
          st->local = i;
          st->heap = std::make_unique<SymmetricHeap>(heap_user, internal);
          bases[static_cast<std::size_t>(st->pe)] = reinterpret_cast<std::uintptr_t>(st->heap->base());
          pes[static_cast<std::size_t>(i)] = std::move(st);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
        ready.count_down();
      });
    }
    ready.wait();
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  heap_total = pes.front()->heap->total_size();

  // Phase 2: access tables and the predefined teams.
  std::vector<PeId> all(static_cast<std::size_t>(world));
  for (int i = 0; i < world; ++i) all[static_cast<std::size_t>(i)] = i;
  std::vector<PeId> mine;
  for (int i = 0; i < npes_local; ++i) mine.push_back(pe_base + i);
  for (auto& st : pes) {
    st->table = AccessTable(st->pe, bases, heap_total);
    auto w = std::make_shared<TeamData>();
    w->id = 0;
    w->members = all;
    w->my_rank = st->pe;
    w->psync = st->heap->alloc_internal(psync_block);
    st->world = Team(std::move(w));
    auto s = std::make_shared<TeamData>();
    s->id = 1;
    s->members = mine;
    s->my_rank = st->local;
    s->psync = st->heap->alloc_internal(psync_block);
    st->shared = Team(std::move(s));
  }

  ring = std::make_unique<Ring>(cfg.ring_capacity, cfg.flow_control_interval);
  copier = std::make_unique<Copier>(*this);
  proxy = std::make_unique<Proxy>(*this);
  if (link) link->start(*this);
}

Node::~Node() { shutdown_services(); }

void Node::shutdown_services() {
  // The proxy drains the ring first, so nothing new reaches the copier or link.
  if (proxy) proxy->stop();
  if (copier) copier->stop();
  if (link) link->close();
}

void Node::ring_doorbell_for(const void* p) noexcept {
  for (auto& st : pes)
    if (st->heap->contains(p)) ring_doorbell(*st);
}

void Node::abort_all() noexcept {
  aborted.store(true, std::memory_order_seq_cst);
  for (auto& st : pes) {
    st->doorbell.fetch_add(1, std::memory_order_seq_cst);
    st->doorbell.notify_all();
  }
}

void Node::check_aborted() const {
  if (aborted.load(std::memory_order_acquire))
    throw Error(ErrorCode::remote_failure, "another PE failed; abandoning the wait");
}

}  // namespace detail

// ---- Context -------------------------------------------------------------

PeId Context::my_pe() const noexcept { return pe_->pe; }
int Context::n_pes() const noexcept { return node_->world; }

SymmetricOffset Context::symm_alloc(std::size_t nbytes) {
  std::lock_guard lk(pe_->alloc_mutex);
  return pe_->heap->alloc(nbytes);
}

std::byte* Context::heap_base() const noexcept { return pe_->heap->base(); }
std::size_t Context::heap_size() const noexcept { return pe_->heap->size(); }

SymmetricOffset Context::offset_of(const void* local_addr) const {
  if (!pe_->heap->contains(local_addr))
    throw Error(ErrorCode::invalid_address, "address is not inside the local symmetric heap");
  return {static_cast<std::uint64_t>(static_cast<const std::byte*>(local_addr) - heap_base())};
}

const AccessTable& Context::access_table() const noexcept { return pe_->table; }
bool Context::is_direct(PeId pe) const noexcept { return pe_->table.is_direct(pe); }

std::optional<void*> Context::translate(const void* local_addr, PeId target) const {
  auto r = pe_->table.translate(reinterpret_cast<std::uintptr_t>(local_addr), target);
  if (!r) return std::nullopt;
  return reinterpret_cast<void*>(*r);
}

void Context::quiet() { pe_->pool.quiet(); }
void Context::fence() { quiet(); }

const Team& Context::team_world() const noexcept { return pe_->world; }
const Team& Context::team_shared() const noexcept { return pe_->shared; }

void Context::work_group(int group_size, const std::function<void(WorkGroup&)>& fn, int lanes) {
  if (group_size < 1) throw Error(ErrorCode::invalid_argument, "work-group size must be >= 1");
  if (lanes <= 0) lanes = node_->lanes_default;
  const int l = std::min(group_size, lanes);
  detail::GroupShared shared(l, node_->cfg.validate);
  if (l == 1) {
    WorkGroup wg(*this, shared, group_size, 1, 0);
    fn(wg);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(l));
  auto body = [&](int lane) {
    WorkGroup wg(*this, shared, group_size, l, lane);
    try {
      fn(wg);
    } catch (...) {
      errors[static_cast<std::size_t>(lane)] = std::current_exception();
      // Let the surviving lanes through any barrier they are still heading for.
      shared.bar.arrive_and_drop();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(l - 1));
  for (int lane = 1; lane < l; ++lane) threads.emplace_back(body, lane);
  body(0);
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

const RuntimeConfig& Context::config() const noexcept { return node_->cfg; }
const CostModel& Context::cost_model() const noexcept { return node_->cost; }
const CutoverPolicy& Context::cutover() const noexcept { return node_->policy; }

// ---- Runtime -------------------------------------------------------------

Runtime::Runtime(RuntimeConfig cfg) {
  const bool standalone = cfg.internode_role == InternodeRole::standalone;
  if (standalone && g_standalone_live.exchange(true))
    throw Error(ErrorCode::runtime_busy, "a standalone runtime is already live in this process");
  try {
    node_ = std::make_unique<detail::Node>(std::move(cfg));
  } catch (...) {
    if (standalone) g_standalone_live.store(false);
    throw;
  }
  node_->standalone_token = standalone;
}

Runtime::~Runtime() {
  if (!node_) return;
  node_->shutdown_services();
  if (node_->standalone_token && !node_->finalized) g_standalone_live.store(false);
}

void Runtime::run(const std::function<void(Context&)>& fn) {
  detail::Node& node = *node_;
  if (node.finalized) throw Error(ErrorCode::already_finalized, "runtime already finalized");
  node.aborted.store(false);
  std::mutex mu;
  std::exception_ptr first;
  auto body = [&](detail::PeState& st) {
    Context ctx(node, st);
    try {
      fn(ctx);
    } catch (...) {
      {
        std::lock_guard lk(mu);
        if (!first) first = std::current_exception();
      }
      node.abort_all();
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(node.pes.size());
  for (auto& st : node.pes) threads.emplace_back(body, std::ref(*st));
  for (auto& t : threads) t.join();
  if (first) std::rethrow_exception(first);
}

void Runtime::finalize() {
  detail::Node& node = *node_;
  if (node.finalized) throw Error(ErrorCode::already_finalized, "finalize called twice");
  std::string pending;
  for (auto& st : node.pes) {
    for (auto [slot, op] : st->pool.pending()) {
      if (!pending.empty()) pending += ", ";
      pending += opcode_name(op) + " from PE " + std::to_string(st->pe) + " (completion " +
                 std::to_string(slot) + ")";
    }
  }
  node.shutdown_services();
  node.finalized = true;
  if (node.standalone_token) g_standalone_live.store(false);
  if (!pending.empty())
    throw Error(ErrorCode::pending_operations, "finalize with operations in flight: " + pending);
}

bool Runtime::finalized() const noexcept { return node_->finalized; }
int Runtime::n_pes() const noexcept { return node_->world; }
int Runtime::local_npes() const noexcept { return node_->npes_local; }
PeId Runtime::pe_base() const noexcept { return node_->pe_base; }
const RuntimeConfig& Runtime::config() const noexcept { return node_->cfg; }
const CostModel& Runtime::cost_model() const noexcept { return node_->cost; }
CutoverPolicy& Runtime::cutover() noexcept { return node_->policy; }

std::span<const std::byte> Runtime::heap_bytes(PeId pe) const {
  if (!node_->is_local(pe))
    throw Error(ErrorCode::invalid_argument, "PE " + std::to_string(pe) + " is not on this node");
  const auto& heap = *node_->local_state(pe).heap;
  return {heap.base(), heap.size()};
}

const AccessTable& Runtime::access_table(PeId pe) const {
  if (!node_->is_local(pe))
    throw Error(ErrorCode::invalid_argument, "PE " + std::to_string(pe) + " is not on this node");
  return node_->local_state(pe).table;
}

std::uint64_t Runtime::ring_messages() const noexcept { return node_->ring->tickets_issued(); }

}  // namespace pgas
