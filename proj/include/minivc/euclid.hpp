#pragma once

#include <cstdint>

namespace minivc {

// Euclidean division: remainder is non-negative for any nonzero divisor.
// Shared between the interpreter and constant folding so both agree with
// the SMT-LIB semantics of div/mod for positive divisors.

inline int64_t euclid_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  int64_t r = a % b;
  if (r < 0)
    q += (b > 0) ? -1 : 1;
  return q;
}

inline int64_t euclid_mod(int64_t a, int64_t b) {
  int64_t r = a % b;
  if (r < 0)
    r += (b > 0) ? b : -b;
  return r;
}

} // namespace minivc
