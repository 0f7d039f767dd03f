// Copyright 2026 The pgas-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <type_traits>
#include <utility>

#include "pgas/error.hpp"

namespace pgas {

/// Global rank of a processing element, 0 <= pe < n_pes.
using PeId = int;

/// Byte offset from the start of a symmetric heap. The same offset names the
/// same object on every PE.
struct SymmetricOffset {
  std::uint64_t value = 0;
  friend auto operator<=>(const SymmetricOffset&, const SymmetricOffset&) = default;
};

/// Element type codes. The numeric values travel on the wire and must not change.
enum class ElementType : std::uint8_t {
  i8 = 0,
  i16 = 1,
  i32 = 2,
  i64 = 3,
  u8 = 4,
  u16 = 5,
  u32 = 6,
  u64 = 7,
  f32 = 8,
  f64 = 9,
};

inline constexpr ElementType kAllElementTypes[] = {
    ElementType::i8,  ElementType::i16, ElementType::i32, ElementType::i64, ElementType::u8,
    ElementType::u16, ElementType::u32, ElementType::u64, ElementType::f32, ElementType::f64};

constexpr std::size_t width(ElementType t) noexcept {
  switch (t) {
    case ElementType::i8:
    case ElementType::u8:
      return 1;
    case ElementType::i16:
    case ElementType::u16:
      return 2;
    case ElementType::i32:
    case ElementType::u32:
    case ElementType::f32:
      return 4;
    case ElementType::i64:
    case ElementType::u64:
    case ElementType::f64:
      return 8;
  }
  return 0;
}

constexpr bool is_floating(ElementType t) noexcept {
  return t == ElementType::f32 || t == ElementType::f64;
}

constexpr bool is_valid(ElementType t) noexcept {
  return static_cast<std::uint8_t>(t) <= static_cast<std::uint8_t>(ElementType::f64);
}

template <class T>
constexpr ElementType element_type_of() {
  if constexpr (std::is_same_v<T, std::int8_t>) return ElementType::i8;
  else if constexpr (std::is_same_v<T, std::int16_t>) return ElementType::i16;
  else if constexpr (std::is_same_v<T, std::int32_t>) return ElementType::i32;
  else if constexpr (std::is_same_v<T, std::int64_t>) return ElementType::i64;
  else if constexpr (std::is_same_v<T, std::uint8_t>) return ElementType::u8;
  else if constexpr (std::is_same_v<T, std::uint16_t>) return ElementType::u16;
  else if constexpr (std::is_same_v<T, std::uint32_t>) return ElementType::u32;
  else if constexpr (std::is_same_v<T, std::uint64_t>) return ElementType::u64;
  else if constexpr (std::is_same_v<T, float>) return ElementType::f32;
  else if constexpr (std::is_same_v<T, double>) return ElementType::f64;
  else static_assert(sizeof(T) == 0, "unsupported element type");
}

/// Invokes f(std::type_identity<T>{}) with T matching the runtime element type.
template <class F>
decltype(auto) dispatch(ElementType t, F&& f) {
  switch (t) {
    case ElementType::i8: return std::forward<F>(f)(std::type_identity<std::int8_t>{});
    case ElementType::i16: return std::forward<F>(f)(std::type_identity<std::int16_t>{});
    case ElementType::i32: return std::forward<F>(f)(std::type_identity<std::int32_t>{});
    case ElementType::i64: return std::forward<F>(f)(std::type_identity<std::int64_t>{});
    case ElementType::u8: return std::forward<F>(f)(std::type_identity<std::uint8_t>{});
    case ElementType::u16: return std::forward<F>(f)(std::type_identity<std::uint16_t>{});
    case ElementType::u32: return std::forward<F>(f)(std::type_identity<std::uint32_t>{});
    case ElementType::u64: return std::forward<F>(f)(std::type_identity<std::uint64_t>{});
    case ElementType::f32: return std::forward<F>(f)(std::type_identity<float>{});
    case ElementType::f64: return std::forward<F>(f)(std::type_identity<double>{});
  }
  throw Error(ErrorCode::unsupported, "unknown element type code");
}

enum class AmoOp : std::uint8_t {
  fetch = 0,
  set,
  swap,
  compare_swap,
  inc,
  add,
  fetch_inc,
  fetch_add,
  bit_and,
  bit_or,
  bit_xor,
  fetch_and,
  fetch_or,
  fetch_xor,
};
inline constexpr std::uint8_t kAmoOpCount = 14;

constexpr bool amo_returns_value(AmoOp op) noexcept {
  switch (op) {
    case AmoOp::fetch:
    case AmoOp::swap:
    case AmoOp::compare_swap:
    case AmoOp::fetch_inc:
    case AmoOp::fetch_add:
    case AmoOp::fetch_and:
    case AmoOp::fetch_or:
    case AmoOp::fetch_xor:
      return true;
    default:
      return false;
  }
}

/// fetch, set, swap and compare_swap are also defined for floating types.
constexpr bool amo_supports(AmoOp op, ElementType t) noexcept {
  if (width(t) != 4 && width(t) != 8) return false;
  if (!is_floating(t)) return true;
  return op == AmoOp::fetch || op == AmoOp::set || op == AmoOp::swap ||
         op == AmoOp::compare_swap;
}

enum class ReduceOp : std::uint8_t { min = 0, max, sum, prod, bit_and, bit_or, bit_xor };

inline constexpr ReduceOp kAllReduceOps[] = {ReduceOp::min,     ReduceOp::max,    ReduceOp::sum,
                                             ReduceOp::prod,    ReduceOp::bit_and, ReduceOp::bit_or,
                                             ReduceOp::bit_xor};

constexpr bool reduce_supports(ReduceOp op, ElementType t) noexcept {
  if (!is_floating(t)) return true;
  return op == ReduceOp::min || op == ReduceOp::max || op == ReduceOp::sum || op == ReduceOp::prod;
}

enum class CmpOp : std::uint8_t { eq, ne, gt, ge, lt, le };

template <class T>
constexpr bool compare(CmpOp op, T lhs, T rhs) noexcept {
  switch (op) {
    case CmpOp::eq: return lhs == rhs;
    case CmpOp::ne: return lhs != rhs;
    case CmpOp::gt: return lhs > rhs;
    case CmpOp::ge: return lhs >= rhs;
    case CmpOp::lt: return lhs < rhs;
    case CmpOp::le: return lhs <= rhs;
  }
  return false;
}

enum class SignalOp : std::uint8_t { set, add };

/// The two data paths a transfer can take.
enum class Path : std::uint8_t { direct, engine };

enum class CutoverMode : std::uint8_t { never, always, tuned };

/// Link classes between PEs. `paired` places PEs 2k and 2k+1 on the same
/// device (cross_tile) and every other pair on different devices.
enum class Topology : std::uint8_t { same_tile, cross_tile, cross_device, paired };

enum class InternodeRole : std::uint8_t { standalone, node_a, node_b };

std::string_view to_string(ElementType t) noexcept;
std::string_view to_string(AmoOp op) noexcept;
std::string_view to_string(ReduceOp op) noexcept;
std::string_view to_string(Path p) noexcept;
std::string_view to_string(CutoverMode m) noexcept;
std::string_view to_string(Topology t) noexcept;
std::string_view to_string(InternodeRole r) noexcept;

std::optional<ElementType> parse_element_type(std::string_view s) noexcept;
std::optional<CutoverMode> parse_cutover_mode(std::string_view s) noexcept;
std::optional<Topology> parse_topology(std::string_view s) noexcept;
std::optional<InternodeRole> parse_internode_role(std::string_view s) noexcept;

}  // namespace pgas
