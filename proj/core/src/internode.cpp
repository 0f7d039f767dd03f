// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/internode.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>

#include "executor.hpp"
#include "le.hpp"
#include "link.hpp"
#include "pgas/copy.hpp"
#include "proxy.hpp"

namespace pgas {

using detail::get_le;
using detail::put_le;

namespace wire {

namespace {

void put_header(std::byte* out, Kind kind) {
  put_le(out, kMagic);
  out[4] = std::byte{kVersion};
  out[5] = std::byte{static_cast<std::uint8_t>(kind)};
  put_le<std::uint16_t>(out + 6, 0);
}

void expect_kind(const std::byte* frame, Kind want) {
  Kind got = decode_header(std::span<const std::byte, kHeaderBytes>(frame, kHeaderBytes));
  if (got != want) throw Error(ErrorCode::protocol, "unexpected frame kind");
}

}  // namespace

std::array<std::byte, kRequestBytes> encode_request(const RingMessage& m) noexcept {
  std::array<std::byte, kRequestBytes> f{};
  put_header(f.data(), Kind::request);
  auto body = encode(m);
  std::memcpy(f.data() + kHeaderBytes, body.data(), body.size());
  return f;
}

std::array<std::byte, kReplyBytes> encode_reply(const Reply& r) noexcept {
  std::array<std::byte, kReplyBytes> f{};
  put_header(f.data(), Kind::reply);
  put_le(f.data() + 8, r.completion_index);
  f[10] = std::byte{static_cast<std::uint8_t>(r.status)};
  put_le(f.data() + 12, r.ret);
  return f;
}

std::array<std::byte, kHelloBytes> encode_hello(const Hello& h) noexcept {
  std::array<std::byte, kHelloBytes> f{};
  put_header(f.data(), Kind::hello);
  put_le(f.data() + 8, h.npes_local);
  put_le(f.data() + 12, h.pe_base);
  put_le(f.data() + 16, h.world);
  put_le(f.data() + 24, h.heap_size);
  return f;
}

Kind decode_header(std::span<const std::byte, kHeaderBytes> h) {
  if (get_le<std::uint32_t>(h.data()) != kMagic) throw Error(ErrorCode::protocol, "bad magic");
  if (std::to_integer<std::uint8_t>(h[4]) != kVersion)
    throw Error(ErrorCode::protocol, "unsupported protocol version");
  auto kind = std::to_integer<std::uint8_t>(h[5]);
  if (kind > static_cast<std::uint8_t>(Kind::hello))
    throw Error(ErrorCode::protocol, "unknown frame kind " + std::to_string(kind));
  return static_cast<Kind>(kind);
}

RingMessage decode_request(std::span<const std::byte, kRequestBytes> f) {
  expect_kind(f.data(), Kind::request);
  return decode_message(std::span<const std::byte, 64>(f.data() + kHeaderBytes, 64));
}

Reply decode_reply(std::span<const std::byte, kReplyBytes> f) {
  expect_kind(f.data(), Kind::reply);
  Reply r;
  r.completion_index = get_le<std::uint16_t>(f.data() + 8);
  auto st = std::to_integer<std::uint8_t>(f[10]);
  if (st > 1) throw Error(ErrorCode::protocol, "bad reply status");
  r.status = static_cast<Status>(st);
  r.ret = get_le<std::uint64_t>(f.data() + 12);
  return r;
}

Hello decode_hello(std::span<const std::byte, kHelloBytes> f) {
  expect_kind(f.data(), Kind::hello);
  Hello h;
  h.npes_local = get_le<std::uint32_t>(f.data() + 8);
  h.pe_base = get_le<std::uint32_t>(f.data() + 12);
  h.world = get_le<std::uint32_t>(f.data() + 16);
  h.heap_size = get_le<std::uint64_t>(f.data() + 24);
  return h;
}

std::string hex(std::span<const std::byte> bytes) {
  std::string out;
  char buf[4];
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%02x", std::to_integer<unsigned>(bytes[i]));
    out += buf;
    if (i + 1 < bytes.size()) out += (i % 16 == 15) ? '\n' : ' ';
  }
  return out;
}

}  // namespace wire

Endpoint parse_endpoint(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
    throw Error(ErrorCode::invalid_config, "endpoint must be host:port, got '" +
                                               std::string(text) + "'");
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  unsigned long port = 0;
  try {
    std::size_t pos = 0;
    port = std::stoul(std::string(text.substr(colon + 1)), &pos);
    if (pos != text.size() - colon - 1) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_config, "bad port in '" + std::string(text) + "'");
  }
  if (port > 65535) throw Error(ErrorCode::invalid_config, "port out of range");
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

std::uint16_t pick_free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error(ErrorCode::io, "socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  socklen_t len = sizeof addr;
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    ::close(fd);
    throw Error(ErrorCode::io, "cannot bind an ephemeral port");
  }
  ::close(fd);
  return ntohs(addr.sin_port);
}

namespace detail {

namespace {

[[noreturn]] void link_error(const std::string& what) {
  throw Error(ErrorCode::link_failure, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const Endpoint& ep) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || !res)
    throw Error(ErrorCode::link_failure, "cannot resolve host '" + ep.host + "'");
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(ep.port);
  return addr;
}

bool write_all(int fd, const std::byte* p, std::size_t n) {
  while (n) {
    ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

bool read_all(int fd, std::byte* p, std::size_t n) {
  while (n) {
    ssize_t r = ::recv(fd, p, n, 0);
    if (r == 0) return false;
    if (r < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    p += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

constexpr auto kConnectTimeout = std::chrono::seconds(30);

int accept_one(const Endpoint& ep) {
  sockaddr_in addr = resolve(ep);
  int ls = ::socket(AF_INET, SOCK_STREAM, 0);
  if (ls < 0) link_error("socket");
  int one = 1;
  ::setsockopt(ls, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(ls, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    int e = errno;
    ::close(ls);
    errno = e;
    link_error("bind " + ep.host + ":" + std::to_string(ep.port));
  }
  if (::listen(ls, 1) != 0) {
    ::close(ls);
    link_error("listen");
  }
  pollfd pfd{ls, POLLIN, 0};
  int ready = ::poll(&pfd, 1, static_cast<int>(
                                  std::chrono::milliseconds(kConnectTimeout).count()));
  if (ready <= 0) {
    ::close(ls);
    throw Error(ErrorCode::link_failure, "peer node never connected");
  }
  int fd = ::accept(ls, nullptr, nullptr);
  ::close(ls);
  if (fd < 0) link_error("accept");
  return fd;
}

int connect_retry(const Endpoint& ep) {
  sockaddr_in addr = resolve(ep);
  auto deadline = std::chrono::steady_clock::now() + kConnectTimeout;
  for (;;) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) link_error("socket");
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) return fd;
    int e = errno;
    ::close(fd);
    if (std::chrono::steady_clock::now() > deadline) {
      errno = e;
      link_error("connect " + ep.host + ":" + std::to_string(ep.port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

}  // namespace

std::unique_ptr<Link> Link::establish(const RuntimeConfig& cfg, int npes_local,
                                      std::size_t heap_size) {
  Endpoint ep = parse_endpoint(cfg.peer_endpoint);
  const bool is_a = cfg.internode_role == InternodeRole::node_a;
  int fd = is_a ? accept_one(ep) : connect_retry(ep);
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

  auto fail = [&](ErrorCode code, const std::string& why) {
    ::close(fd);
    throw Error(code, why);
  };
  auto read_hello = [&]() {
    std::array<std::byte, wire::kHelloBytes> buf;
    if (!read_all(fd, buf.data(), buf.size()))
      fail(ErrorCode::link_failure, "peer closed the connection during the handshake");
    try {
      return wire::decode_hello(buf);
    } catch (const Error& e) {
      fail(ErrorCode::protocol, std::string("bad hello: ") + e.what());
    }
    return wire::Hello{};
  };

  wire::Hello mine;
  mine.npes_local = static_cast<std::uint32_t>(npes_local);
  mine.world = static_cast<std::uint32_t>(cfg.world_npes);
  mine.heap_size = heap_size;
  wire::Hello theirs;
  if (is_a) {
    mine.pe_base = 0;
    auto f = wire::encode_hello(mine);
    if (!write_all(fd, f.data(), f.size())) fail(ErrorCode::link_failure, "handshake write");
    theirs = read_hello();
  } else {
    theirs = read_hello();
    mine.pe_base = theirs.npes_local;
    auto f = wire::encode_hello(mine);
    if (!write_all(fd, f.data(), f.size())) fail(ErrorCode::link_failure, "handshake write");
  }

  const std::uint32_t world = mine.npes_local + theirs.npes_local;
  auto bad_world = [&](std::uint32_t w) { return w != 0 && w != world; };
  if (bad_world(mine.world) || bad_world(theirs.world))
    fail(ErrorCode::geometry_mismatch,
         "world size disagreement: " + std::to_string(mine.npes_local) + " + " +
             std::to_string(theirs.npes_local) + " PEs, configured " +
             std::to_string(mine.world) + " here and " + std::to_string(theirs.world) +
             " on the peer");
  if (mine.heap_size != theirs.heap_size)
    fail(ErrorCode::geometry_mismatch, "heap sizes differ: " + std::to_string(mine.heap_size) +
                                           " vs " + std::to_string(theirs.heap_size));
  if (!is_a && theirs.pe_base != 0) fail(ErrorCode::geometry_mismatch, "node_a must own PE 0");
  if (is_a && theirs.pe_base != mine.npes_local)
    fail(ErrorCode::geometry_mismatch, "peer numbered its PEs from " +
                                           std::to_string(theirs.pe_base));

  return std::unique_ptr<Link>(new Link(fd, npes_local, static_cast<PeId>(mine.pe_base),
                                        static_cast<int>(theirs.npes_local),
                                        static_cast<PeId>(theirs.pe_base), cfg.trace_wire));
}

Link::Link(int fd, int my_npes, PeId my_base, int peer_npes, PeId peer_base, bool trace)
    : fd_(fd),
      my_npes_(my_npes),
      my_base_(my_base),
      peer_npes_(peer_npes),
      peer_base_(peer_base),
      trace_(trace) {}

Link::~Link() { close(); }

void Link::start(Node& node) {
  node_ = &node;
  sender_ = std::thread([this] { sender_loop(); });
  receiver_ = std::thread([this] { receiver_loop(); });
}

void Link::trace(const char* dir, std::span<const std::byte> bytes) {
  if (!trace_) return;
  std::fprintf(stderr, "[wire %s %zu bytes]\n%s\n", dir, bytes.size(), wire::hex(bytes).c_str());
}

void Link::enqueue(std::vector<std::byte> frame) {
  std::lock_guard lk(send_mu_);
  outbox_.push_back(std::move(frame));
  send_cv_.notify_one();
}

void Link::sender_loop() {
  for (;;) {
    std::vector<std::byte> frame;
    {
      std::unique_lock lk(send_mu_);
      send_cv_.wait(lk, [&] { return send_stop_ || !outbox_.empty(); });
      if (outbox_.empty()) return;
      frame = std::move(outbox_.front());
      outbox_.pop_front();
    }
    trace("out", frame);
    if (!write_all(fd_, frame.data(), frame.size())) {
      go_down("write failed");
      return;
    }
  }
}

void Link::forward(const RingMessage& m) {
  if (!up()) {
    fail_request(*node_, m, ErrorCode::link_failure);
    return;
  }
  RingMessage out = m;
  out.seq = out_seq_++;
  std::size_t extra = request_payload_bytes(m);
  std::vector<std::byte> frame(wire::kRequestBytes + extra);
  auto head = wire::encode_request(out);
  std::memcpy(frame.data(), head.data(), head.size());
  if (extra) {
    if (!(m.flags & msg_flag::local_token))
      throw Error(ErrorCode::protocol, "forwarded request has no local source buffer");
    const auto* src = reinterpret_cast<const std::byte*>(m.addr_b);
    if (m.op == opcode::iput) {
      std::size_t w = width(static_cast<ElementType>(m.dtype));
      race_copy_strided(frame.data() + wire::kRequestBytes, src, m.count, w, 1, m.imm2);
    } else {
      race_copy(frame.data() + wire::kRequestBytes, src, extra);
    }
  }
  if (m.flags & msg_flag::completion) {
    auto idx = static_cast<std::uint16_t>((m.src_pe - my_base_) * CompletionPool::kSlots +
                                          m.completion_index);
    std::lock_guard lk(pending_mu_);
    pending_[idx] = m;
  }
  enqueue(std::move(frame));
  // The link may have dropped between the check above and registration.
  if (!up()) go_down("link down");
}

bool Link::read_exact(std::byte* p, std::size_t n) { return read_all(fd_, p, n); }

void Link::serve_request(const RingMessage& m, std::vector<std::byte>& payload) {
  wire::Reply reply;
  reply.completion_index = static_cast<std::uint16_t>((m.src_pe - peer_base_) *
                                                          CompletionPool::kSlots +
                                                      m.completion_index);
  std::vector<std::byte> out(reply_payload_bytes(m));
  try {
    Payload data;
    data.src = payload.data();
    data.dst = out.data();
    reply.ret = execute_request(*node_, m, data);
  } catch (const Error& e) {
    reply.status = wire::Status::error;
    reply.ret = static_cast<std::uint64_t>(e.code());
    std::fill(out.begin(), out.end(), std::byte{0});
  }
  if (!(m.flags & msg_flag::completion)) return;
  std::vector<std::byte> frame(wire::kReplyBytes + out.size());
  auto head = wire::encode_reply(reply);
  std::memcpy(frame.data(), head.data(), head.size());
  if (!out.empty()) std::memcpy(frame.data() + wire::kReplyBytes, out.data(), out.size());
  enqueue(std::move(frame));
}

void Link::take_reply(const wire::Reply& r) {
  RingMessage m;
  {
    std::lock_guard lk(pending_mu_);
    auto it = pending_.find(r.completion_index);
    if (it == pending_.end()) throw Error(ErrorCode::protocol, "reply for unknown completion");
    m = it->second;
    pending_.erase(it);
  }
  std::size_t extra = reply_payload_bytes(m);
  std::vector<std::byte> data(extra);
  if (extra && !read_exact(data.data(), extra))
    throw Error(ErrorCode::link_failure, "connection closed inside a reply");
  if (extra) trace("in", data);
  if (r.status == wire::Status::error) {
    fail_request(*node_, m, static_cast<ErrorCode>(r.ret));
    return;
  }
  if (extra) {
    auto* dst = reinterpret_cast<std::byte*>(m.addr_b);
    if (m.op == opcode::iget) {
      std::size_t w = width(static_cast<ElementType>(m.dtype));
      race_copy_strided(dst, data.data(), m.count, w, m.imm2, 1);
    } else {
      race_copy(dst, data.data(), extra);
    }
    node_->ring_doorbell_for(dst);
  }
  complete_request(*node_, m, r.ret);
}

void Link::receiver_loop() {
  std::vector<std::byte> payload;
  try {
    for (;;) {
      std::array<std::byte, wire::kRequestBytes> buf;
      if (!read_exact(buf.data(), wire::kHeaderBytes)) {
        // A peer that finalized first closes quietly; only report stranded requests.
        bool stranded;
        {
          std::lock_guard lk(pending_mu_);
          stranded = !pending_.empty();
        }
        go_down(stranded ? "peer closed the connection with requests in flight" : nullptr);
        return;
      }
      wire::Kind kind =
          wire::decode_header(std::span<const std::byte, wire::kHeaderBytes>(buf.data(), 8));
      if (kind == wire::Kind::request) {
        if (!read_exact(buf.data() + 8, wire::kRequestBytes - 8))
          throw Error(ErrorCode::link_failure, "connection closed inside a request");
        trace("in", buf);
        RingMessage m = wire::decode_request(buf);
        if (m.seq != in_seq_)
          throw Error(ErrorCode::protocol, "request sequence " + std::to_string(m.seq) +
                                               ", expected " + std::to_string(in_seq_));
        ++in_seq_;
        if (!is_valid_opcode(m.op)) throw Error(ErrorCode::protocol, "unknown opcode");
        std::size_t extra = request_payload_bytes(m);
        if (extra > node_->heap_total)
          throw Error(ErrorCode::protocol, "request payload larger than the heap");
        payload.resize(extra);
        if (extra && !read_exact(payload.data(), extra))
          throw Error(ErrorCode::link_failure, "connection closed inside a payload");
        if (extra) trace("in", payload);
        serve_request(m, payload);
      } else if (kind == wire::Kind::reply) {
        if (!read_exact(buf.data() + 8, wire::kReplyBytes - 8))
          throw Error(ErrorCode::link_failure, "connection closed inside a reply");
        trace("in", std::span<const std::byte>(buf.data(), wire::kReplyBytes));
        take_reply(wire::decode_reply(
            std::span<const std::byte, wire::kReplyBytes>(buf.data(), wire::kReplyBytes)));
      } else {
        throw Error(ErrorCode::protocol, "hello after the handshake");
      }
    }
  } catch (const std::exception& e) {
    std::string why = std::string("closing link: ") + e.what();
    go_down(why.c_str());
  }
}

void Link::go_down(const char* reason) {
  bool was_up = up_.exchange(false);
  if (was_up && reason && !closing_.load())
    std::fprintf(stderr, "pgas: internode %s\n", reason);
  ::shutdown(fd_, SHUT_RDWR);
  std::unordered_map<std::uint16_t, RingMessage> failed;
  {
    std::lock_guard lk(pending_mu_);
    failed.swap(pending_);
  }
  for (auto& [idx, m] : failed) fail_request(*node_, m, ErrorCode::link_failure);
  {
    std::lock_guard lk(send_mu_);
    send_stop_ = true;
    outbox_.clear();
    send_cv_.notify_all();
  }
}

void Link::close() {
  if (fd_ < 0) return;
  closing_.store(true);
  {
    // Let queued replies drain before tearing the socket down.
    std::unique_lock lk(send_mu_);
    send_stop_ = true;
    send_cv_.notify_all();
  }
  if (sender_.joinable()) sender_.join();
  ::shutdown(fd_, SHUT_WR);
  if (receiver_.joinable()) receiver_.join();
  if (node_) go_down(nullptr);
  ::close(fd_);
  fd_ = -1;
}

}  // namespace detail
}  // namespace pgas
