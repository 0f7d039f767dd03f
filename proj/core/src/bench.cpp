// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/bench.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "lockstep.hpp"
#include "pgas/collectives.hpp"
#include "pgas/cost_model.hpp"
#include "pgas/rma.hpp"
#include "pgas/runtime.hpp"

namespace pgas {

Clock steady_clock_seconds() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
}

std::uint64_t warmup(const Clock& clock, const std::function<void(std::uint64_t)>& batch) {
  for (std::uint64_t n = 1;; n *= 2) {
    double t0 = clock();
    batch(n);
    if (clock() - t0 > kWarmupSeconds || n >= kMaxIterations) return n;
  }
}

Measurement measure(const Clock& clock, const std::function<void(std::uint64_t)>& batch,
                    int trials) {
  if (trials < 1) throw Error(ErrorCode::invalid_argument, "need at least one trial");
  Measurement m;
  m.iterations = warmup(clock, batch);
  for (int t = 0; t < trials; ++t) {
    double t0 = clock();
    batch(m.iterations);
    m.trials.push_back(clock() - t0);
  }
  m.best_seconds = *std::min_element(m.trials.begin(), m.trials.end());
  return m;
}

std::vector<Measurement> measure_interleaved(
    const Clock& clock, const std::vector<std::function<void(std::uint64_t)>>& batches,
    int trials, const std::vector<std::size_t>& share) {
  if (trials < 1) throw Error(ErrorCode::invalid_argument, "need at least one trial");
  std::vector<Measurement> out(batches.size());
  std::vector<std::uint64_t> warm(batches.size());
  for (std::size_t i = 0; i < batches.size(); ++i) warm[i] = warmup(clock, batches[i]);
  // Each batch carries a fixed handoff cost. Series whose warm-ups landed one
  // doubling apart run the larger count so that cost is amortized alike.
  for (std::size_t i = 0; i < batches.size(); ++i) {
    out[i].iterations = warm[i];
    for (std::size_t j = 0; j < warm.size(); ++j)
      if ((share.empty() || share[j] == share[i]) && warm[j] <= 2 * warm[i])
        out[i].iterations = std::max(out[i].iterations, warm[j]);
  }
  // Odd rounds run in reverse so no series always follows the same neighbour.
  for (int t = 0; t < trials; ++t)
    for (std::size_t k = 0; k < batches.size(); ++k) {
      const std::size_t i = t % 2 ? batches.size() - 1 - k : k;
      double t0 = clock();
      batches[i](out[i].iterations);
      out[i].trials.push_back(clock() - t0);
    }
  for (auto& m : out) m.best_seconds = *std::min_element(m.trials.begin(), m.trials.end());
  return out;
}

BenchRecord make_record(std::string op, std::string topology, std::string mode, int work_items,
                        int npes, std::uint64_t size, std::uint64_t bytes_per_iteration,
                        const Measurement& m) {
  BenchRecord r;
  r.op = std::move(op);
  r.topology = std::move(topology);
  r.mode = std::move(mode);
  r.work_items = work_items;
  r.npes = npes;
  r.size = size;
  r.iterations = m.iterations;
  r.best_seconds = m.best_seconds;
  const double iters = static_cast<double>(m.iterations);
  if (m.best_seconds > 0) {
    r.bandwidth = static_cast<double>(bytes_per_iteration) * iters / m.best_seconds;
    r.latency_us = m.best_seconds / iters * 1e6;
  }
  return r;
}

// ---- CSV -------------------------------------------------------------------

namespace {

template <class T>
void put_number(std::string& out, T v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

template <class T>
T get_number(std::string_view s, std::size_t line) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::io, "line " + std::to_string(line) + ": bad number '" +
                                   std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

std::string to_csv(const std::vector<BenchRecord>& records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const BenchRecord& r : records) {
    for (const std::string* s : {&r.op, &r.topology, &r.mode})
      if (s->find_first_of(",\n\r") != std::string::npos)
        throw Error(ErrorCode::io, "CSV field '" + *s + "' contains a separator");
    out += r.op;
    out += ',';
    out += r.topology;
    out += ',';
    out += r.mode;
    out += ',';
    put_number(out, r.work_items);
    out += ',';
    put_number(out, r.npes);
    out += ',';
    put_number(out, r.size);
    out += ',';
    put_number(out, r.iterations);
    out += ',';
    put_number(out, r.best_seconds);
    out += ',';
    put_number(out, r.bandwidth);
    out += ',';
    put_number(out, r.latency_us);
    out += '\n';
  }
  return out;
}

std::vector<BenchRecord> parse_csv(std::string_view text) {
  std::vector<BenchRecord> out;
  std::size_t line_no = 0;
  bool header = false;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!header) {
      if (line != kCsvHeader)
        throw Error(ErrorCode::io, "unexpected CSV header '" + std::string(line) + "'");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 10)
      throw Error(ErrorCode::io, "line " + std::to_string(line_no) + ": expected 10 fields, got " +
                                     std::to_string(f.size()));
    BenchRecord r;
    r.op = std::string(f[0]);
    r.topology = std::string(f[1]);
    r.mode = std::string(f[2]);
    r.work_items = get_number<int>(f[3], line_no);
    r.npes = get_number<int>(f[4], line_no);
    r.size = get_number<std::uint64_t>(f[5], line_no);
    r.iterations = get_number<std::uint64_t>(f[6], line_no);
    r.best_seconds = get_number<double>(f[7], line_no);
    r.bandwidth = get_number<double>(f[8], line_no);
    r.latency_us = get_number<double>(f[9], line_no);
    out.push_back(std::move(r));
  }
  if (!header) throw Error(ErrorCode::io, "empty CSV");
  return out;
}

void write_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::io, "cannot open " + path.string());
  f << to_csv(records);
  if (!f.flush()) throw Error(ErrorCode::io, "write to " + path.string() + " failed");
}

void append_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream f(path, std::ios::binary | std::ios::app);
  if (!f) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::string text = to_csv(records);
  if (!fresh) text.erase(0, kCsvHeader.size() + 1);
  f << text;
  if (!f.flush()) throw Error(ErrorCode::io, "write to " + path.string() + " failed");
}

std::vector<std::uint64_t> pow2_range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = std::max<std::uint64_t>(lo, 1); s <= hi; s *= 2) out.push_back(s);
  return out;
}

// ---- lockstep driver ---------------------------------------------------------

namespace detail {

void Lockstep::run(Runtime& rt) const {
  if (rt.local_npes() != rt.n_pes())
    throw Error(ErrorCode::geometry_mismatch, "benchmarks run on a standalone runtime");
  std::barrier<> bar(rt.local_npes());
  std::atomic<std::uint64_t> command{0};
  std::atomic<std::size_t> current{0};

  rt.run([&](Context& ctx) {
    try {
      if (setup) setup(ctx);
      sync_all(ctx);
      if (ctx.my_pe() == 0) {
        for (std::size_t first = 0; first < points;) {
          std::size_t last = first + 1;
          while (last < points && !group.empty() && group[last] == group[first]) ++last;
          std::vector<std::function<void(std::uint64_t)>> batches;
          for (std::size_t p = first; p < last; ++p)
            batches.push_back([&, p](std::uint64_t n) {
              if (prepare) prepare(p);
              current.store(p);
              command.store(n);
              bar.arrive_and_wait();
              body(ctx, p, n);
              bar.arrive_and_wait();
            });
          std::vector<std::size_t> ids;
          if (!share.empty()) ids.assign(share.begin() + first, share.begin() + last);
          auto ms = measure_interleaved(clock, batches, trials, ids);
          for (std::size_t p = first; p < last; ++p)
            if (done) done(p, ms[p - first]);
          first = last;
        }
        command.store(0);
        bar.arrive_and_wait();
      } else {
        for (;;) {
          bar.arrive_and_wait();
          std::uint64_t n = command.load();
          if (n == 0) break;
          body(ctx, current.load(), n);
          bar.arrive_and_wait();
        }
      }
    } catch (...) {
      // Free the others from the host barrier; the runtime wakes any PE
      // blocked in a sync once this exception leaves the PE.
      bar.arrive_and_drop();
      throw;
    }
  });
}

}  // namespace detail

// ---- suites ------------------------------------------------------------------

namespace {

constexpr std::uint64_t kMiB = std::uint64_t{1} << 20;

std::vector<CutoverMode> suite_modes(const SuiteOptions& o) {
  if (o.mode) return {*o.mode};
  if (o.suite == "c1") return {o.base.cutover_mode};
  return {CutoverMode::never, CutoverMode::always, CutoverMode::tuned};
}

std::vector<int> fcollect_npes(const SuiteOptions& o) {
  return o.npes.empty() ? std::vector<int>{4, 8, 12} : o.npes;
}

std::vector<int> broadcast_npes(const SuiteOptions& o) {
  return o.npes.empty() ? std::vector<int>{2, 4, 6, 8, 10, 12} : o.npes;
}

RuntimeConfig suite_config(const SuiteOptions& o, Topology topo, std::size_t heap_needed) {
  RuntimeConfig cfg = o.base;
  cfg.topology = topo;
  cfg.heap_size = std::max(cfg.heap_size, heap_needed);
  return cfg;
}

void fill_pattern(Context& ctx, SymmetricOffset off, std::size_t n) {
  std::byte* p = ctx.local(off);
  for (std::size_t i = 0; i < n; ++i)
    p[i] = static_cast<std::byte>((i * 131 + static_cast<std::size_t>(ctx.my_pe()) * 17) & 0xff);
}

struct RmaPoint {
  std::string op;
  CutoverMode mode;
  int group;
  std::uint64_t size;
};

// Consecutive points with equal keys share an id.
template <class Point, class Key>
std::vector<std::size_t> run_ids(const std::vector<Point>& points, Key key) {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < points.size(); ++i)
    ids.push_back(i == 0 ? 0 : ids.back() + (key(points[i]) != key(points[i - 1])));
  return ids;
}

void run_rma(const SuiteOptions& o, Topology topo, const std::vector<RmaPoint>& points,
             std::vector<BenchRecord>& out) {
  std::uint64_t max_size = 0;
  for (auto& p : points) max_size = std::max(max_size, p.size);
  Runtime rt(suite_config(o, topo, 2 * max_size + kMiB));
  SymmetricOffset src, dst;
  std::vector<std::byte> local(max_size);

  detail::Lockstep ls;
  ls.points = points.size();
  // Trials interleave across every size of an (op, G) block so a slow spell
  // on the host cannot cover all trials of one series; the modes of a single
  // point share warm-up counts.
  ls.group = run_ids(points, [](const RmaPoint& p) { return std::tie(p.op, p.group); });
  ls.share = run_ids(points, [](const RmaPoint& p) { return std::tie(p.op, p.group, p.size); });
  ls.trials = o.trials;
  ls.clock = o.clock;
  ls.setup = [&](Context& ctx) {
    src = ctx.symm_alloc(max_size);
    dst = ctx.symm_alloc(max_size);
    fill_pattern(ctx, src, max_size);
  };
  ls.prepare = [&](std::size_t p) { rt.cutover().set_mode(points[p].mode); };
  ls.body = [&](Context& ctx, std::size_t p, std::uint64_t n) {
    if (ctx.my_pe() != 0) return;
    const RmaPoint& pt = points[p];
    const PeId peer = ctx.n_pes() > 1 ? 1 : 0;
    if (pt.op == "get") {
      for (std::uint64_t i = 0; i < n; ++i) get(ctx, local.data(), src, pt.size, peer);
    } else if (pt.group == 1 && pt.op == "put") {
      for (std::uint64_t i = 0; i < n; ++i) put(ctx, dst, ctx.local(src), pt.size, peer);
    } else {
      ctx.work_group(pt.group, [&](WorkGroup& wg) {
        for (std::uint64_t i = 0; i < n; ++i) put_work_group(wg, dst, ctx.local(src), pt.size, peer);
      });
    }
  };
  ls.done = [&](std::size_t p, const Measurement& m) {
    const RmaPoint& pt = points[p];
    BenchRecord r = make_record(pt.op, std::string(to_string(topo)), std::string(to_string(pt.mode)),
                                pt.group, 2, pt.size, pt.size, m);
    if (o.on_record) o.on_record(r);
    out.push_back(std::move(r));
  };
  ls.run(rt);
  rt.finalize();
}

struct CollPoint {
  std::string op;
  CutoverMode mode;
  int group;
  int npes;
  std::uint64_t nelems;
};

void run_c3(const SuiteOptions& o, Topology topo, const std::vector<CollPoint>& points,
            std::vector<BenchRecord>& out) {
  std::uint64_t max_n = 0;
  int max_npes = 1;
  std::vector<int> team_sizes;
  for (auto& p : points) {
    max_n = std::max(max_n, p.nelems);
    max_npes = std::max(max_npes, p.npes);
    if (std::find(team_sizes.begin(), team_sizes.end(), p.npes) == team_sizes.end())
      team_sizes.push_back(p.npes);
  }
  const std::size_t w = 8;
  Runtime rt(suite_config(o, topo, (static_cast<std::size_t>(max_npes) + 1) * max_n * w + kMiB));
  SymmetricOffset src, dst;
  // teams[pe][npes]
  std::vector<std::map<int, Team>> teams(static_cast<std::size_t>(rt.n_pes()));

  detail::Lockstep ls;
  ls.points = points.size();
  ls.group = run_ids(points, [](const CollPoint& p) { return std::tie(p.op, p.group, p.npes); });
  ls.share = run_ids(
      points, [](const CollPoint& p) { return std::tie(p.op, p.group, p.npes, p.nelems); });
  ls.trials = o.trials;
  ls.clock = o.clock;
  ls.setup = [&](Context& ctx) {
    src = ctx.symm_alloc(max_n * w);
    dst = ctx.symm_alloc(static_cast<std::size_t>(max_npes) * max_n * w);
    fill_pattern(ctx, src, max_n * w);
    auto& mine = teams[static_cast<std::size_t>(ctx.my_pe())];
    for (int k : team_sizes) mine[k] = team_split_strided(ctx, ctx.team_world(), 0, 1, k);
  };
  ls.prepare = [&](std::size_t p) { rt.cutover().set_mode(points[p].mode); };
  ls.body = [&](Context& ctx, std::size_t p, std::uint64_t n) {
    const CollPoint& pt = points[p];
    const Team& team = teams[static_cast<std::size_t>(ctx.my_pe())][pt.npes];
    if (team.is_null()) return;
    ctx.work_group(pt.group, [&](WorkGroup& wg) {
      for (std::uint64_t i = 0; i < n; ++i) {
        if (pt.op == "fcollect")
          fcollect_work_group(wg, team, dst, src, pt.nelems, ElementType::i64);
        else
          broadcast_work_group(wg, team, dst, src, pt.nelems, ElementType::i64, 0);
      }
    });
  };
  ls.done = [&](std::size_t p, const Measurement& m) {
    const CollPoint& pt = points[p];
    BenchRecord r = make_record(pt.op, std::string(to_string(topo)), std::string(to_string(pt.mode)),
                                pt.group, pt.npes, pt.nelems, pt.nelems * w, m);
    if (o.on_record) o.on_record(r);
    out.push_back(std::move(r));
  };
  ls.run(rt);
  rt.finalize();
}

}  // namespace

int suite_min_pes(const SuiteOptions& o) {
  if (o.suite != "c3") return 2;
  int n = 2;
  for (int k : fcollect_npes(o)) n = std::max(n, k);
  if (o.include_broadcast)
    for (int k : broadcast_npes(o)) n = std::max(n, k);
  return n;
}

std::vector<BenchRecord> run_suite(const SuiteOptions& o) {
  if (o.suite != "c1" && o.suite != "c2" && o.suite != "c3")
    throw Error(ErrorCode::invalid_config, "unknown suite '" + o.suite + "' (want c1, c2 or c3)");
  if (o.base.internode_role != InternodeRole::standalone)
    throw Error(ErrorCode::geometry_mismatch, "benchmark suites run on a standalone node");
  const int need = suite_min_pes(o);
  if (o.base.npes < need)
    throw Error(ErrorCode::geometry_mismatch, "suite " + o.suite + " needs " +
                                                  std::to_string(need) + " PEs, config has " +
                                                  std::to_string(o.base.npes));
  SuiteOptions opts = o;
  if (opts.base.time_scale <= 0)
    opts.base.time_scale = calibrate_time_scale(measure_host_copy_bandwidth());

  const auto modes = suite_modes(opts);
  std::vector<BenchRecord> out;
  if (opts.suite == "c1" || opts.suite == "c2") {
    const auto sizes = opts.sizes.empty() ? pow2_range(8, 16 * kMiB) : opts.sizes;
    if (opts.suite == "c1") {
      std::vector<Topology> topos = {Topology::same_tile, Topology::cross_tile,
                                     Topology::cross_device};
      if (opts.topology) topos = {*opts.topology};
      for (Topology t : topos) {
        std::vector<RmaPoint> pts;
        // Modes innermost: a point's series sit side by side in every round.
        for (const char* op : {"put", "get"})
          for (auto s : sizes)
            for (CutoverMode m : modes) pts.push_back({op, m, 1, s});
        run_rma(opts, t, pts, out);
      }
    } else {
      const auto groups =
          opts.group_sizes.empty() ? std::vector<int>{1, 16, 128, 1024} : opts.group_sizes;
      std::vector<RmaPoint> pts;
      for (int g : groups)
        for (auto s : sizes)
          for (CutoverMode m : modes) pts.push_back({"put_work_group", m, g, s});
      run_rma(opts, opts.topology.value_or(Topology::cross_device), pts, out);
    }
    return out;
  }

  const auto nelems = opts.sizes.empty() ? pow2_range(1, 32768) : opts.sizes;
  const auto groups =
      opts.group_sizes.empty() ? std::vector<int>{16, 128, 256, 1024} : opts.group_sizes;
  std::vector<CollPoint> pts;
  for (int k : fcollect_npes(opts))
    for (int g : groups)
      for (auto n : nelems)
        for (CutoverMode m : modes) pts.push_back({"fcollect", m, g, k, n});
  if (opts.include_broadcast) {
    const std::vector<CutoverMode> bmodes =
        opts.mode ? std::vector<CutoverMode>{*opts.mode} : std::vector<CutoverMode>{CutoverMode::tuned};
    for (int k : broadcast_npes(opts))
      for (CutoverMode m : bmodes)
        for (auto n : nelems) pts.push_back({"broadcast", m, 128, k, n});
  }
  run_c3(opts, opts.topology.value_or(Topology::paired), pts, out);
  return out;
}

}  // namespace pgas
