//===- checked.hpp - Overflow-checked integer arithmetic --------*- C++ -*-===//
//
// Every integer operation on coefficients and loop values goes through these
// helpers. Overflow throws ErrorKind::Overflow instead of wrapping.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "polyhls/support/error.hpp"

#include <cstdint>
#include <cstdlib>

namespace polyhls {

using Int = std::int64_t;

namespace checked {

inline Int add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r))
    fail(ErrorKind::Overflow, "addition overflows 64 bits");
  return r;
}

inline Int sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r))
    fail(ErrorKind::Overflow, "subtraction overflows 64 bits");
  return r;
}

inline Int mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r))
    fail(ErrorKind::Overflow, "multiplication overflows 64 bits");
  return r;
}

inline Int neg(Int a) { return sub(0, a); }

inline Int abs(Int a) { return a < 0 ? neg(a) : a; }

/// Rounds toward negative infinity. The divisor must be positive.
inline Int floor_div(Int a, Int b) {
  if (b <= 0)
    fail(ErrorKind::Malformed, "division by non-positive constant");
  Int q = a / b;
  if ((a % b) != 0 && a < 0)
    --q;
  return q;
}

inline Int ceil_div(Int a, Int b) {
  if (b <= 0)
    fail(ErrorKind::Malformed, "division by non-positive constant");
  Int q = a / b;
  if ((a % b) != 0 && a > 0)
    ++q;
  return q;
}

/// Result is always in [0, b).
inline Int mod(Int a, Int b) {
  if (b <= 0)
    fail(ErrorKind::Malformed, "modulo by non-positive constant");
  Int r = a % b;
  return r < 0 ? r + b : r;
}

inline Int gcd(Int a, Int b) {
  a = abs(a);
  b = abs(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

} // namespace checked
} // namespace polyhls
