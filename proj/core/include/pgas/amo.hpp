// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <type_traits>

#include "pgas/runtime.hpp"
#include "pgas/types.hpp"

namespace pgas {

/// Atomic read-modify-write on `dest` at PE pe, sequentially consistent.
/// Operands and the result are raw bits of `type`, zero-extended. Returns the
/// prior value for fetching ops and 0 otherwise. Throws misaligned or
/// unsupported.
std::uint64_t amo(Context& ctx, AmoOp op, SymmetricOffset dest, std::uint64_t operand,
                  std::uint64_t compare, PeId pe, ElementType type);

namespace detail {
template <class T>
std::uint64_t to_bits(T v) noexcept {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  return std::bit_cast<U>(v);
}
template <class T>
T from_bits(std::uint64_t b) noexcept {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  return std::bit_cast<T>(static_cast<U>(b));
}
template <class T>
T amo_typed(Context& ctx, AmoOp op, SymmetricOffset dest, T operand, T cmp, PeId pe) {
  return from_bits<T>(amo(ctx, op, dest, to_bits(operand), to_bits(cmp), pe, element_type_of<T>()));
}
}  // namespace detail

template <class T>
T atomic_fetch(Context& ctx, SymmetricOffset dest, PeId pe) {
  return detail::amo_typed<T>(ctx, AmoOp::fetch, dest, T{}, T{}, pe);
}
template <class T>
void atomic_set(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  detail::amo_typed<T>(ctx, AmoOp::set, dest, value, T{}, pe);
}
template <class T>
T atomic_swap(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  return detail::amo_typed<T>(ctx, AmoOp::swap, dest, value, T{}, pe);
}
/// Stores value if the current contents equal cond (bitwise for floats).
template <class T>
T atomic_compare_swap(Context& ctx, SymmetricOffset dest, T cond, T value, PeId pe) {
  return detail::amo_typed<T>(ctx, AmoOp::compare_swap, dest, value, cond, pe);
}
template <class T>
void atomic_inc(Context& ctx, SymmetricOffset dest, PeId pe) {
  detail::amo_typed<T>(ctx, AmoOp::inc, dest, T{}, T{}, pe);
}
template <class T>
void atomic_add(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  detail::amo_typed<T>(ctx, AmoOp::add, dest, value, T{}, pe);
}
template <class T>
T atomic_fetch_inc(Context& ctx, SymmetricOffset dest, PeId pe) {
  return detail::amo_typed<T>(ctx, AmoOp::fetch_inc, dest, T{}, T{}, pe);
}
template <class T>
T atomic_fetch_add(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  return detail::amo_typed<T>(ctx, AmoOp::fetch_add, dest, value, T{}, pe);
}
template <class T>
void atomic_and(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  detail::amo_typed<T>(ctx, AmoOp::bit_and, dest, value, T{}, pe);
}
template <class T>
void atomic_or(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  detail::amo_typed<T>(ctx, AmoOp::bit_or, dest, value, T{}, pe);
}
template <class T>
void atomic_xor(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  detail::amo_typed<T>(ctx, AmoOp::bit_xor, dest, value, T{}, pe);
}
template <class T>
T atomic_fetch_and(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  return detail::amo_typed<T>(ctx, AmoOp::fetch_and, dest, value, T{}, pe);
}
template <class T>
T atomic_fetch_or(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  return detail::amo_typed<T>(ctx, AmoOp::fetch_or, dest, value, T{}, pe);
}
template <class T>
T atomic_fetch_xor(Context& ctx, SymmetricOffset dest, T value, PeId pe) {
  return detail::amo_typed<T>(ctx, AmoOp::fetch_xor, dest, value, T{}, pe);
}

}  // namespace pgas
