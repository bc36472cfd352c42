#pragma once

// High-precision reference for Laguerre polynomial values, used only by tests.
// Evaluates the finite alternating sum
//
//   L_k(x) = sum_{j=0}^{k} (-1)^j C(k,j) x^j / j!
//
// term-by-term in 128-bit quad precision (__float128, ~33 significant decimal
// digits), which absorbs the catastrophic cancellation that makes this sum
// unusable in double precision at large k. Term recurrence:
//
//   t_0 = 1,   t_{j+1} = t_j * (-x) * (k - j) / (j + 1)^2.
//
// Frozen reference implementation; do not modify when production code changes.

#include <stdexcept>

namespace oracle {

inline double laguerre_direct_sum_hp(int k, double x) {
  if (k < 0) throw std::invalid_argument("laguerre oracle: negative order");
  __float128 acc = 1.0;
  __float128 term = 1.0;
  const __float128 xq = x;
  for (int j = 0; j < k; ++j) {
    term *= -xq * static_cast<__float128>(k - j) /
            (static_cast<__float128>(j + 1) * static_cast<__float128>(j + 1));
    acc += term;
  }
  return static_cast<double>(acc);
}

}  // namespace oracle
