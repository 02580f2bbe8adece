#ifndef TRIM_ARITH_HPP
#define TRIM_ARITH_HPP

#include <optional>

#include "trim/term.hpp"

namespace trim {

enum class IntMode { Math, Wrap32 };

inline constexpr Int kInt32Min = -2147483648LL;
inline constexpr Int kInt32Max = 2147483647LL;

/// Applies a binary arithmetic operator. Math mode reports overflow of the
/// 64-bit carrier as nullopt; Wrap32 wraps to two's-complement 32 bits.
std::optional<Int> applyArith(TermKind op, Int a, Int b, IntMode mode = IntMode::Math);

inline Int wrap32(Int v) {
  return static_cast<Int>(static_cast<std::int32_t>(static_cast<std::uint32_t>(v)));
}

}  // namespace trim

#endif  // TRIM_ARITH_HPP
