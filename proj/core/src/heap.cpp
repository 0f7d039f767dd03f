// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "pgas/heap.hpp"

#include <cstring>
#include <new>
#include <string>

namespace pgas {

namespace {

std::size_t round_up(std::size_t n, std::size_t a) { return (n + a - 1) / a * a; }

}  // namespace

SymmetricHeap::SymmetricHeap(std::size_t user_size, std::size_t internal_size)
    : size_(user_size), internal_cursor_(round_up(user_size, kAlignment)) {
  total_ = internal_cursor_ + round_up(internal_size, kAlignment);
  try {
    base_ = static_cast<std::byte*>(::operator new(total_, std::align_val_t{kAlignment}));
  } catch (const std::bad_alloc&) {
    throw Error(ErrorCode::heap_exhausted,
                "cannot allocate a symmetric heap of " + std::to_string(total_) + " bytes");
  }
  std::memset(base_, 0, total_);
}

SymmetricHeap::~SymmetricHeap() { ::operator delete(base_, std::align_val_t{kAlignment}); }

SymmetricOffset SymmetricHeap::alloc(std::size_t nbytes) {
  if (nbytes == 0) throw Error(ErrorCode::invalid_argument, "symm_alloc of zero bytes");
  std::size_t rounded = round_up(nbytes, kAlignment);
  if (rounded < nbytes || rounded > size_ - cursor_)
    throw Error(ErrorCode::heap_exhausted, "symm_alloc(" + std::to_string(nbytes) + ") with " +
                                               std::to_string(size_ - cursor_) + " bytes left");
  SymmetricOffset off{cursor_};
  cursor_ += rounded;
  return off;
}

SymmetricOffset SymmetricHeap::alloc_internal(std::size_t nbytes) {
  std::size_t rounded = round_up(nbytes, kAlignment);
  if (rounded > total_ - internal_cursor_)
    throw Error(ErrorCode::capacity, "internal symmetric area exhausted (too many teams)");
  SymmetricOffset off{internal_cursor_};
  internal_cursor_ += rounded;
  return off;
}

void SymmetricHeap::set_internal_cursor(std::size_t c) {
  if (c < round_up(size_, kAlignment) || c > total_)
    throw Error(ErrorCode::capacity, "internal cursor out of range");
  internal_cursor_ = c;
}

bool SymmetricHeap::contains(const void* p, std::size_t n) const noexcept {
  auto a = reinterpret_cast<std::uintptr_t>(p);
  auto b = reinterpret_cast<std::uintptr_t>(base_);
  return a >= b && a - b <= total_ && n <= total_ - (a - b);
}

AccessTable::AccessTable(PeId self, std::span<const std::uintptr_t> bases, std::size_t heap_bytes)
    : self_(self), heap_bytes_(heap_bytes), local_index_(bases.size(), 0) {
  if (self < 0 || static_cast<std::size_t>(self) >= bases.size() || bases[self] == 0)
    throw Error(ErrorCode::invalid_config, "access table needs our own heap base");
  local_base_ = bases[self];
  for (std::size_t pe = 0; pe < bases.size(); ++pe) {
    if (bases[pe] == 0) continue;
    offsets_.push_back(static_cast<std::int64_t>(bases[pe] - local_base_));
    local_index_[pe] = static_cast<std::uint32_t>(offsets_.size());
  }
}

std::optional<std::uintptr_t> AccessTable::translate(std::uintptr_t local_addr,
                                                     PeId target) const {
  if (local_addr < local_base_ || local_addr - local_base_ >= heap_bytes_)
    throw Error(ErrorCode::invalid_address, "address is not inside the local symmetric heap");
  if (target < 0 || target >= npes())
    throw Error(ErrorCode::invalid_argument, "PE " + std::to_string(target) + " out of range");
  std::uint32_t idx = local_index_[static_cast<std::size_t>(target)];
  if (idx == 0) return std::nullopt;
  return local_addr + static_cast<std::uintptr_t>(offsets_[idx - 1]);
}

}  // namespace pgas
