// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "program.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "pgas/amo.hpp"
#include "pgas/collectives.hpp"
#include "pgas/rma.hpp"

namespace pgas::testsupport {

std::string to_string(OpCode c) {
  static const char* names[] = {"put", "get", "put_nbi", "get_nbi", "p",          "g",
                                "iput", "iget", "put_signal", "amo", "quiet"};
  return names[static_cast<int>(c)];
}

std::size_t Program::op_count() const {
  std::size_t n = 0;
  for (auto& e : epochs)
    for (auto& op : e) n += op.code != OpCode::quiet;
  return n;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mask_of(std::size_t w) { return w >= 8 ? ~0ull : (1ull << (8 * w)) - 1; }

std::uint64_t extent(std::uint64_t nelems, std::size_t w, std::uint64_t stride) {
  return ((nelems - 1) * stride + 1) * w;
}

std::uint64_t load(const std::vector<std::byte>& a, std::uint64_t off, std::size_t w) {
  std::uint64_t v = 0;
  std::memcpy(&v, a.data() + off, w);
  return v;
}

void store(std::vector<std::byte>& a, std::uint64_t off, std::uint64_t v, std::size_t w) {
  std::memcpy(a.data() + off, &v, w);
}

struct Interval {
  std::uint64_t lo, hi;
};

bool hits(const std::vector<Interval>& v, Interval x) {
  for (const Interval& i : v)
    if (x.lo < i.hi && i.lo < x.hi) return true;
  return false;
}

// Commuting update classes an AMO word may be shared by within an epoch.
int amo_class(AmoOp op, ElementType t) {
  int kind = 0;
  switch (op) {
    case AmoOp::inc:
    case AmoOp::add: kind = 1; break;
    case AmoOp::bit_xor: kind = 2; break;
    case AmoOp::bit_or: kind = 3; break;
    case AmoOp::bit_and: kind = 4; break;
    default: return -1;
  }
  return kind << 8 | static_cast<int>(t);
}

class Generator {
 public:
  Generator(std::uint64_t seed, int npes, ProgramLayout layout)
      : rng_(seed), npes_(npes), layout_(layout) {
    prog_.seed = seed;
    prog_.npes = npes;
    prog_.layout = layout;
    state_ = initial_areas(prog_);
    next_result_.assign(static_cast<std::size_t>(npes), 0);
  }

  Program run(std::size_t nops) {
    std::size_t made = 0;
    while (made < nops) {
      begin_epoch();
      const int len = uniform(10, 60);
      for (int k = 0; k < len && made < nops; ++k) {
        const PeId issuer = uniform(0, npes_ - 1);
        if (uniform(0, 7) == 0) {
          Op q;
          q.code = OpCode::quiet;
          q.issuer = q.target = issuer;
          prog_.epochs.back().push_back(q);
          continue;
        }
        for (int attempt = 0; attempt < 20; ++attempt) {
          if (auto op = make(issuer)) {
            apply(state_, *op, layout_);
            prog_.epochs.back().push_back(*op);
            ++made;
            break;
          }
        }
      }
    }
    return std::move(prog_);
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t uniform64(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng_);
  }

  void begin_epoch() {
    prog_.epochs.emplace_back();
    written_.assign(static_cast<std::size_t>(npes_), {});
    read_.assign(static_cast<std::size_t>(npes_), {});
    word_class_.clear();
  }

  std::uint64_t pick_size() {
    int r = uniform(0, 9);
    if (r < 5) return uniform64(1, 64);
    if (r < 8) return uniform64(65, 4096);
    return uniform64(4097, 16384);
  }

  std::uint64_t pick_offset(std::uint64_t n, std::size_t align) {
    std::uint64_t hi = (layout_.data_bytes - n) / align;
    return uniform64(0, hi) * align;
  }

  ElementType pick_type() { return kAllElementTypes[uniform(0, 9)]; }

  // Claims a read on rpe and a write on wpe, or fails without side effects.
  bool claim(PeId rpe, Interval r, PeId wpe, Interval w) {
    auto& rd = read_[static_cast<std::size_t>(rpe)];
    auto& wr = written_[static_cast<std::size_t>(wpe)];
    if (r.hi > r.lo && hits(written_[static_cast<std::size_t>(rpe)], r)) return false;
    if (hits(wr, w) || hits(read_[static_cast<std::size_t>(wpe)], w)) return false;
    if (rpe == wpe && r.hi > r.lo && w.lo < r.hi && r.lo < w.hi) return false;
    if (r.hi > r.lo) rd.push_back(r);
    wr.push_back(w);
    return true;
  }

  bool claim_word(PeId pe, std::uint64_t word, int cls) {
    auto key = std::make_pair(pe, word);
    auto it = word_class_.find(key);
    if (it == word_class_.end()) {
      word_class_[key] = cls;
      return true;
    }
    return cls != -1 && it->second == cls;
  }

  bool take_result(Op& op) {
    auto& next = next_result_[static_cast<std::size_t>(op.issuer)];
    if (next >= layout_.result_slots) return false;
    op.result = layout_.result_base() + 8 * next++;
    return true;
  }

  std::optional<Op> make(PeId issuer) {
    static constexpr OpCode kinds[] = {OpCode::put, OpCode::get, OpCode::put_nbi, OpCode::get_nbi,
                                       OpCode::p,   OpCode::g,   OpCode::iput,    OpCode::iget,
                                       OpCode::put_signal, OpCode::amo};
    static constexpr int weights[] = {14, 14, 10, 10, 8, 8, 6, 6, 6, 18};
    std::discrete_distribution<int> pick(std::begin(weights), std::end(weights));
    Op op;
    op.code = kinds[pick(rng_)];
    op.issuer = issuer;
    op.target = uniform(0, npes_ - 1);
    switch (op.code) {
      case OpCode::put:
      case OpCode::put_nbi:
      case OpCode::put_signal: {
        op.nbytes = pick_size();
        op.remote = pick_offset(op.nbytes, 1);
        op.local = pick_offset(op.nbytes, 1);
        if (op.code == OpCode::put_signal) {
          op.signal = layout_.amo_base() + 8 * uniform64(0, layout_.amo_words - 1);
          if (!claim_word(op.target, op.signal, -1)) return std::nullopt;
          op.signal_op = uniform(0, 1) ? SignalOp::add : SignalOp::set;
          op.value = rng_();
        }
        if (!claim(issuer, {op.local, op.local + op.nbytes}, op.target,
                   {op.remote, op.remote + op.nbytes}))
          return std::nullopt;
        return op;
      }
      case OpCode::get:
      case OpCode::get_nbi: {
        op.nbytes = pick_size();
        op.remote = pick_offset(op.nbytes, 1);
        op.local = pick_offset(op.nbytes, 1);
        if (!claim(op.target, {op.remote, op.remote + op.nbytes}, issuer,
                   {op.local, op.local + op.nbytes}))
          return std::nullopt;
        return op;
      }
      case OpCode::p: {
        op.type = pick_type();
        const std::size_t w = width(op.type);
        op.remote = pick_offset(w, w);
        op.value = rng_() & mask_of(w);
        if (!claim(issuer, {0, 0}, op.target, {op.remote, op.remote + w})) return std::nullopt;
        return op;
      }
      case OpCode::g: {
        op.type = pick_type();
        const std::size_t w = width(op.type);
        op.remote = pick_offset(w, w);
        auto& wr = written_[static_cast<std::size_t>(op.target)];
        if (hits(wr, {op.remote, op.remote + w}) || !take_result(op)) return std::nullopt;
        read_[static_cast<std::size_t>(op.target)].push_back({op.remote, op.remote + w});
        return op;
      }
      case OpCode::iput:
      case OpCode::iget: {
        op.type = pick_type();
        const std::size_t w = width(op.type);
        op.nelems = uniform64(1, 64);
        op.dst_stride = uniform64(1, 4);
        op.src_stride = uniform64(1, 4);
        const bool is_put = op.code == OpCode::iput;
        const std::uint64_t dext = extent(op.nelems, w, op.dst_stride);
        const std::uint64_t sext = extent(op.nelems, w, op.src_stride);
        op.remote = pick_offset(is_put ? dext : sext, w);
        op.local = pick_offset(is_put ? sext : dext, w);
        bool ok = is_put ? claim(issuer, {op.local, op.local + sext}, op.target,
                                 {op.remote, op.remote + dext})
                         : claim(op.target, {op.remote, op.remote + sext}, issuer,
                                 {op.local, op.local + dext});
        if (!ok) return std::nullopt;
        return op;
      }
      case OpCode::amo: {
        static constexpr ElementType types[] = {ElementType::i32, ElementType::u32,
                                                ElementType::i64, ElementType::u64,
                                                ElementType::f32, ElementType::f64};
        op.type = types[uniform(0, 5)];
        do {
          op.amo = static_cast<AmoOp>(uniform(0, kAmoOpCount - 1));
        } while (!amo_supports(op.amo, op.type));
        const std::size_t w = width(op.type);
        const std::uint64_t word = uniform64(0, layout_.amo_words - 1);
        op.remote = layout_.amo_base() + 8 * word;
        op.value = rng_() & mask_of(w);
        if (op.amo == AmoOp::add || op.amo == AmoOp::fetch_add) op.value &= 0xffff;
        const std::uint64_t current = load(state_[static_cast<std::size_t>(op.target)], op.remote, w);
        op.compare = uniform(0, 1) ? current : (rng_() & mask_of(w));
        if (amo_returns_value(op.amo) && next_result_[static_cast<std::size_t>(issuer)] >=
                                             layout_.result_slots)
          return std::nullopt;
        if (!claim_word(op.target, op.remote, amo_class(op.amo, op.type))) return std::nullopt;
        if (amo_returns_value(op.amo)) take_result(op);
        return op;
      }
      case OpCode::quiet:
        break;
    }
    return std::nullopt;
  }

  std::mt19937_64 rng_;
  int npes_;
  ProgramLayout layout_;
  Program prog_;
  Heaps state_;
  std::vector<std::uint64_t> next_result_;
  std::vector<std::vector<Interval>> written_, read_;
  std::map<std::pair<PeId, std::uint64_t>, int> word_class_;
};

std::uint64_t amo_result(AmoOp op, std::uint64_t old, const Op& o, std::size_t w,
                         std::uint64_t* updated) {
  const std::uint64_t m = mask_of(w);
  std::uint64_t nv = old;
  switch (op) {
    case AmoOp::fetch: break;
    case AmoOp::set:
    case AmoOp::swap: nv = o.value; break;
    case AmoOp::compare_swap:
      if (old == o.compare) nv = o.value;
      break;
    case AmoOp::inc:
    case AmoOp::fetch_inc: nv = old + 1; break;
    case AmoOp::add:
    case AmoOp::fetch_add: nv = old + o.value; break;
    case AmoOp::bit_and:
    case AmoOp::fetch_and: nv = old & o.value; break;
    case AmoOp::bit_or:
    case AmoOp::fetch_or: nv = old | o.value; break;
    case AmoOp::bit_xor:
    case AmoOp::fetch_xor: nv = old ^ o.value; break;
  }
  *updated = nv & m;
  return old;
}

}  // namespace

Program generate_program(std::uint64_t seed, int npes, std::size_t nops, ProgramLayout layout) {
  return Generator(seed, npes, layout).run(nops);
}

Heaps initial_areas(const Program& prog) {
  Heaps out(static_cast<std::size_t>(prog.npes));
  const std::uint64_t n = prog.layout.bytes();
  for (int pe = 0; pe < prog.npes; ++pe) {
    auto& a = out[static_cast<std::size_t>(pe)];
    a.resize(n);
    for (std::uint64_t i = 0; i < n; i += 8) {
      std::uint64_t v = splitmix(prog.seed ^ (static_cast<std::uint64_t>(pe) << 40) ^ i);
      std::memcpy(a.data() + i, &v, std::min<std::uint64_t>(8, n - i));
    }
  }
  return out;
}

void apply(Heaps& areas, const Op& op, const ProgramLayout&) {
  auto& me = areas[static_cast<std::size_t>(op.issuer)];
  auto& tg = areas[static_cast<std::size_t>(op.target)];
  const std::size_t w = width(op.type);
  switch (op.code) {
    case OpCode::put:
    case OpCode::put_nbi:
      std::memmove(tg.data() + op.remote, me.data() + op.local, op.nbytes);
      break;
    case OpCode::get:
    case OpCode::get_nbi:
      std::memmove(me.data() + op.local, tg.data() + op.remote, op.nbytes);
      break;
    case OpCode::p:
      store(tg, op.remote, op.value, w);
      break;
    case OpCode::g:
      store(me, op.result, load(tg, op.remote, w), 8);
      break;
    case OpCode::iput:
      for (std::uint64_t i = 0; i < op.nelems; ++i)
        std::memmove(tg.data() + op.remote + i * op.dst_stride * w,
                     me.data() + op.local + i * op.src_stride * w, w);
      break;
    case OpCode::iget:
      for (std::uint64_t i = 0; i < op.nelems; ++i)
        std::memmove(me.data() + op.local + i * op.dst_stride * w,
                     tg.data() + op.remote + i * op.src_stride * w, w);
      break;
    case OpCode::put_signal: {
      std::memmove(tg.data() + op.remote, me.data() + op.local, op.nbytes);
      std::uint64_t s = load(tg, op.signal, 8);
      store(tg, op.signal, op.signal_op == SignalOp::set ? op.value : s + op.value, 8);
      break;
    }
    case OpCode::amo: {
      std::uint64_t updated = 0;
      const std::uint64_t old = amo_result(op.amo, load(tg, op.remote, w), op, w, &updated);
      store(tg, op.remote, updated, w);
      if (amo_returns_value(op.amo)) store(me, op.result, old, 8);
      break;
    }
    case OpCode::quiet:
      break;
  }
}

Heaps simulate(const Program& prog) {
  Heaps areas = initial_areas(prog);
  for (auto& epoch : prog.epochs)
    for (auto& op : epoch) apply(areas, op, prog.layout);
  return areas;
}

void execute(Context& ctx, const Program& prog, SymmetricOffset base) {
  const PeId me = ctx.my_pe();
  std::byte* area = ctx.local(base);
  {
    Program one = prog;
    one.npes = me + 1;
    auto init = initial_areas(one);
    std::memcpy(area, init.back().data(), prog.layout.bytes());
  }
  barrier_all(ctx);
  for (auto& epoch : prog.epochs) {
    for (const Op& op : epoch) {
      if (op.issuer != me) continue;
      const SymmetricOffset r{base.value + op.remote};
      std::byte* l = area + op.local;
      const std::size_t w = width(op.type);
      switch (op.code) {
        case OpCode::put: put(ctx, r, l, op.nbytes, op.target); break;
        case OpCode::put_nbi: put_nbi(ctx, r, l, op.nbytes, op.target); break;
        case OpCode::get: get(ctx, l, r, op.nbytes, op.target); break;
        case OpCode::get_nbi: get_nbi(ctx, l, r, op.nbytes, op.target); break;
        case OpCode::p: p_bits(ctx, r, op.value, op.type, op.target); break;
        case OpCode::g: {
          std::uint64_t v = g_bits(ctx, r, op.type, op.target) & mask_of(w);
          std::memcpy(area + op.result, &v, 8);
          break;
        }
        case OpCode::iput:
          iput(ctx, r, l, op.dst_stride, op.src_stride, op.nelems, op.type, op.target);
          break;
        case OpCode::iget:
          iget(ctx, l, r, op.dst_stride, op.src_stride, op.nelems, op.type, op.target);
          break;
        case OpCode::put_signal:
          put_signal(ctx, r, l, op.nbytes, SymmetricOffset{base.value + op.signal}, op.value,
                     op.signal_op, op.target);
          break;
        case OpCode::amo: {
          std::uint64_t v =
              amo(ctx, op.amo, r, op.value, op.compare, op.target, op.type) & mask_of(w);
          if (amo_returns_value(op.amo)) std::memcpy(area + op.result, &v, 8);
          break;
        }
        case OpCode::quiet: ctx.quiet(); break;
      }
    }
    barrier_all(ctx);
  }
}

Heaps run_program(Runtime& rt, const Program& prog) {
  std::mutex mu;
  std::uint64_t base = 0;
  rt.run([&](Context& ctx) {
    SymmetricOffset off = ctx.symm_alloc(prog.layout.bytes());
    {
      std::lock_guard lk(mu);
      base = off.value;
    }
    execute(ctx, prog, off);
  });
  Heaps out;
  for (int i = 0; i < rt.local_npes(); ++i) {
    auto bytes = rt.heap_bytes(rt.pe_base() + i).subspan(base, prog.layout.bytes());
    out.emplace_back(bytes.begin(), bytes.end());
  }
  return out;
}

std::string first_difference(const Heaps& got, const Heaps& want, int pe_base) {
  if (got.size() != want.size())
    return "PE count " + std::to_string(got.size()) + " vs " + std::to_string(want.size());
  for (std::size_t p = 0; p < got.size(); ++p) {
    if (got[p].size() != want[p].size()) return "area size differs on PE " + std::to_string(p);
    auto mm = std::mismatch(got[p].begin(), got[p].end(), want[p].begin());
    if (mm.first != got[p].end()) {
      std::ostringstream os;
      os << "PE " << (pe_base + static_cast<int>(p)) << " byte " << (mm.first - got[p].begin())
         << ": got " << static_cast<int>(*mm.first) << " want " << static_cast<int>(*mm.second);
      return os.str();
    }
  }
  return {};
}

}  // namespace pgas::testsupport
