// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxy.hpp"

#include <algorithm>
#include <cstdio>

#include "executor.hpp"
#include "link.hpp"
#include "pgas/copy.hpp"

namespace pgas::detail {

void complete_request(Node& node, const RingMessage& m, std::uint64_t ret) {
  if (!(m.flags & msg_flag::completion)) return;
  node.local_state(m.src_pe).pool.complete(m.completion_index, ret);
}

void fail_request(Node& node, const RingMessage& m, ErrorCode code) {
  if (!(m.flags & msg_flag::completion)) {
    std::fprintf(stderr, "pgas: %s from PE %u failed: %s\n", opcode_name(m.op).c_str(), m.src_pe,
                 std::string(to_string(code)).c_str());
    return;
  }
  node.local_state(m.src_pe).pool.fail(m.completion_index, code);
}

Copier::Copier(Node& node) : node_(node) { thread_ = std::thread([this] { loop(); }); }

Copier::~Copier() { stop(); }

void Copier::submit(Job job) {
  {
    std::lock_guard lk(mu_);
    if (!stop_) {
      queue_.push_back(job);
      cv_.notify_one();
      return;
    }
  }
  if (job.has_completion) job.owner->pool.fail(job.slot, ErrorCode::send_after_shutdown);
}

void Copier::stop() {
  std::deque<Job> abandoned;
  {
    std::lock_guard lk(mu_);
    if (stop_ && !thread_.joinable()) return;
    stop_ = true;
    abandoned.swap(queue_);
    cv_.notify_all();
  }
  if (thread_.joinable()) thread_.join();
  for (const Job& j : abandoned)
    if (j.has_completion) j.owner->pool.fail(j.slot, ErrorCode::send_after_shutdown);
}

bool Copier::sleep_until(SteadyTime deadline) {
  using namespace std::chrono;
  if (deadline - steady_clock::now() > 300us) {
    std::unique_lock lk(mu_);
    if (cv_.wait_until(lk, deadline - 150us, [&] { return stop_; })) return false;
  }
  pace_until(deadline);
  std::lock_guard lk(mu_);
  return !stop_;
}

void Copier::run(const Job& job) {
  auto start = std::chrono::steady_clock::now();
  bool ok = sleep_until(after(start, job.startup));
  if (ok) {
    auto copy_start = std::chrono::steady_clock::now();
    constexpr std::size_t kChunk = std::size_t{256} << 10;
    for (std::size_t done = 0; done < job.bytes;) {
      std::size_t n = std::min(kChunk, job.bytes - done);
      race_copy(job.dst + done, job.src + done, n);
      done += n;
      if (job.bandwidth > 0) {
        auto deadline = after(copy_start, static_cast<double>(done) / job.bandwidth);
        if (!sleep_until(deadline)) {
          ok = false;
          break;
        }
      }
    }
  }
  if (ok && job.signal) {
    std::atomic_ref<std::uint64_t> s(*job.signal);
    if (job.signal_add)
      s.fetch_add(job.signal_value, std::memory_order_acq_rel);
    else
      s.store(job.signal_value, std::memory_order_release);
  }
  if (job.written) node_.ring_doorbell(*job.written);
  done_.fetch_add(1, std::memory_order_relaxed);
  if (!job.has_completion) return;
  if (ok)
    job.owner->pool.complete(job.slot, 0);
  else
    job.owner->pool.fail(job.slot, ErrorCode::send_after_shutdown);
}

void Copier::loop() {
  for (;;) {
    Job job;
    {
      std::unique_lock lk(mu_);
      cv_.wait(lk, [&] { return stop_ || !queue_.empty(); });
      if (stop_) return;
      job = queue_.front();
      queue_.pop_front();
    }
    run(job);
  }
}

Proxy::Proxy(Node& node) : node_(node) { thread_ = std::thread([this] { loop(); }); }

Proxy::~Proxy() { stop(); }

void Proxy::stop() {
  node_.ring->shutdown();
  if (thread_.joinable()) thread_.join();
  flush_reorder();
}

void Proxy::set_reorder(std::size_t window, std::uint64_t seed) {
  std::lock_guard lk(reorder_mu_);
  rng_.seed(seed);
  reorder_window_.store(window, std::memory_order_release);
}

void Proxy::flush_reorder() {
  std::vector<RingMessage> batch;
  {
    std::lock_guard lk(reorder_mu_);
    if (held_.empty()) return;
    batch.swap(held_);
    std::vector<RingMessage> arrived = batch;
    std::shuffle(batch.begin(), batch.end(), rng_);
    std::uint64_t moved = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) moved += !(batch[i] == arrived[i]);
    reordered_.fetch_add(moved, std::memory_order_relaxed);
  }
  for (const RingMessage& m : batch) complete_request(node_, m, m.imm1);
}

void Proxy::loop() {
  Ring& ring = *node_.ring;
  for (;;) {
    auto m = ring.try_consume();
    if (!m) {
      flush_reorder();
      m = ring.consume_wait();
      if (!m) return;
    }
    handled_.fetch_add(1, std::memory_order_relaxed);
    try {
      handle(*m);
    } catch (const Error& e) {
      fail_request(node_, *m, e.code());
    } catch (const std::exception&) {
      fail_request(node_, *m, ErrorCode::remote_failure);
    }
  }
}

void Proxy::handle(const RingMessage& m) {
  if (m.op == opcode::nop) {
    if (std::size_t window = reorder_window_.load(std::memory_order_acquire)) {
      bool full;
      {
        std::lock_guard lk(reorder_mu_);
        held_.push_back(m);
        full = held_.size() >= window;
      }
      if (full) flush_reorder();
      return;
    }
    complete_request(node_, m, m.imm1);
    return;
  }

  const PeId target = m.dst_pe;
  if (!node_.is_local(target)) {
    if (!node_.link) throw Error(ErrorCode::link_failure, "no peer node for PE " +
                                                              std::to_string(target));
    node_.link->forward(m);
    return;
  }

  const bool token = m.flags & msg_flag::local_token;
  if ((m.flags & msg_flag::engine) &&
      (m.op == opcode::put || m.op == opcode::get || m.op == opcode::put_signal_set ||
       m.op == opcode::put_signal_add)) {
    if (!token) throw Error(ErrorCode::protocol, "engine request without a local buffer");
    const LinkProfile& link = node_.cost.link(m.src_pe, target);
    Copier::Job job;
    job.bytes = m.count;
    job.startup = link.engine_startup;
    job.bandwidth = link.engine_bandwidth;
    job.owner = &node_.local_state(m.src_pe);
    job.slot = m.completion_index;
    job.has_completion = m.flags & msg_flag::completion;
    if (m.op == opcode::get) {
      job.src = heap_addr(node_, target, m.addr_a, m.count);
      job.dst = reinterpret_cast<std::byte*>(m.addr_b);
      for (auto& pe : node_.pes)
        if (pe->heap->contains(job.dst, m.count)) job.written = pe.get();
    } else {
      job.src = reinterpret_cast<const std::byte*>(m.addr_b);
      job.dst = heap_addr(node_, target, m.addr_a, m.count);
      job.written = &node_.local_state(target);
      if (m.op != opcode::put) {
        if (m.imm2 % 8) throw Error(ErrorCode::misaligned, "signal must be 8-byte aligned");
        job.signal = reinterpret_cast<std::uint64_t*>(heap_addr(node_, target, m.imm2, 8));
        job.signal_value = m.imm1;
        job.signal_add = m.op == opcode::put_signal_add;
      }
    }
    node_.copier->submit(job);
    return;
  }

  Payload data;
  if (token) {
    data.src = reinterpret_cast<const std::byte*>(m.addr_b);
    data.dst = reinterpret_cast<std::byte*>(m.addr_b);
    // For iput the source stride rides in imm2, for iget the destination's.
    data.src_stride = m.op == opcode::iput ? m.imm2 : 1;
    data.dst_stride = m.op == opcode::iget ? m.imm2 : 1;
  }
  std::uint64_t ret = execute_request(node_, m, data);
  complete_request(node_, m, ret);
}

}  // namespace pgas::detail
