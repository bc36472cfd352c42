#pragma once

// Series-tail reference for the quadratic-truncation bound, used only by
// tests. The bound is a sum of three exponential-series tails
//
//   eps = V_*      * tail(alpha * M * sqrt(1 - lambda_min))
//       + 2^(-1/2) * W^(-2) * tail(sqrt(2) * gamma * M * W^(3/2))
//       + (2W)^(-1)         * tail(sqrt(2W) * beta * M)
//
// with tail(x) = sum_{j>=3} x^j / j!. The reference evaluates the tails by
// direct summation of 200 series terms in long double, independent of any
// closed form used in production.
//
// Frozen reference implementation; do not modify when production code changes.

#include <cmath>

namespace oracle {

inline double series_tail_direct(double x, int terms = 200) {
  long double acc = 0.0L;
  // term_j = x^j / j!, starting at j = 3.
  long double term = static_cast<long double>(x) * x * x / 6.0L;
  for (int j = 3; j < 3 + terms; ++j) {
    acc += term;
    term *= static_cast<long double>(x) / static_cast<long double>(j + 1);
  }
  return static_cast<double>(acc);
}

inline double quadratic_truncation_eps_direct(double alpha, double beta, double gamma,
                                              double m_inputs, double w, double lambda_min,
                                              double v_m_star) {
  const double x1 = alpha * m_inputs * std::sqrt(1.0 - lambda_min);
  const double x2 = std::sqrt(2.0) * gamma * m_inputs * std::pow(w, 1.5);
  const double x3 = std::sqrt(2.0 * w) * beta * m_inputs;
  return v_m_star * series_tail_direct(x1) +
         std::pow(2.0, -0.5) * std::pow(w, -2.0) * series_tail_direct(x2) +
         1.0 / (2.0 * w) * series_tail_direct(x3);
}

}  // namespace oracle
