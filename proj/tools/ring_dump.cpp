// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Annotated hex of ring slots: either sample requests pushed through a ring,
// or a 64-byte message image given in hex.

#include <cctype>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "pgas/ring.hpp"
#include "pgas/types.hpp"

namespace {

void print(std::size_t slot, const pgas::RingMessage& m) {
  std::printf("slot %zu: %s\n%s\n", slot, pgas::opcode_name(m.op).c_str(),
              pgas::hex_dump(m).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dump ring slots"};
  std::string decode;
  std::size_t capacity = 8, count = 4;
  app.add_option("--decode", decode, "128 hex digits of one message image");
  app.add_option("--capacity", capacity, "Ring slots (power of two)");
  app.add_option("--count", count, "Sample requests to push");
  CLI11_PARSE(app, argc, argv);

  if (!decode.empty()) {
    std::string digits;
    for (char c : decode)
      if (std::isxdigit(static_cast<unsigned char>(c))) digits += c;
    if (digits.size() != 128) {
      std::fprintf(stderr, "pgas-ring-dump: need 64 bytes, got %zu hex digits\n", digits.size());
      return 2;
    }
    std::array<std::byte, 64> bytes;
    for (std::size_t i = 0; i < 64; ++i)
      bytes[i] = static_cast<std::byte>(std::stoul(digits.substr(2 * i, 2), nullptr, 16));
    print(0, pgas::decode_message(bytes));
    return 0;
  }

  try {
    pgas::Ring ring(capacity);
    const std::uint8_t ops[] = {pgas::opcode::put, pgas::opcode::get, pgas::opcode::p,
                                pgas::opcode::amo_base + static_cast<std::uint8_t>(pgas::AmoOp::fetch_add)};
    for (std::size_t i = 0; i < count && i < capacity; ++i) {
      pgas::RingMessage m;
      m.op = ops[i % 4];
      m.dtype = static_cast<std::uint8_t>(pgas::ElementType::u64);
      m.flags = pgas::msg_flag::completion;
      m.src_pe = static_cast<std::uint16_t>(i % 2);
      m.dst_pe = static_cast<std::uint16_t>((i + 1) % 2);
      m.completion_index = static_cast<std::uint16_t>(i);
      m.addr_a = 0x1000 + 0x40 * i;
      m.count = 8 << i;
      m.imm1 = i;
      ring.send(m);
    }
    for (std::size_t s = 0; s < std::min(count, capacity); ++s) print(s, ring.peek_slot(s));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pgas-ring-dump: %s\n", e.what());
    return 2;
  }
  return 0;
}
