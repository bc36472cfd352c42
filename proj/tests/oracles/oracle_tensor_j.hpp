#pragma once

// Tensor-quadrature reference for the band-limited DPSWF product integral
//
//   J(W, Q, f, m_Q) = int_{(-W,W)^{Q-1}} V_{m_Q}(f - sum f_j)
//                                        * prod_{j=1}^{Q-1} V_{m_j}(f_j) df_j
//
// for Q in {2, 3}. Wave functions are evaluated by direct summation
// V(f) = sum_t v_t e^{-i 2 pi f t} (periodic in f by construction), and the
// integral uses trapezoid weights on a uniform frequency grid of G bins with
// +-W required to land on grid bins. O(G^(Q-1)) cost; small problems only.
//
// Frozen reference implementation; do not modify when production code changes.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oracle {

inline std::complex<double> dpswf_direct(const std::vector<double>& v, double f) {
  const double pi = 3.14159265358979323846;
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t t = 0; t < v.size(); ++t) {
    const double ph = -2.0 * pi * f * static_cast<double>(t);
    acc += v[t] * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  return acc;
}

namespace detail_j {

struct BandGrid {
  std::vector<double> freqs;    // in-band node frequencies, ascending -W..W
  std::vector<double> weights;  // trapezoid weights (h inside, h/2 at +-W)
};

inline BandGrid band_grid(int grid_size, double w) {
  const double h = 1.0 / grid_size;
  const double edge = w * grid_size;
  const long long ib = std::llround(edge);
  if (std::abs(edge - static_cast<double>(ib)) > 1e-9)
    throw std::invalid_argument("tensor J oracle: +-W must be on-grid");
  BandGrid g;
  for (long long i = -ib; i <= ib; ++i) {
    g.freqs.push_back(static_cast<double>(i) * h);
    g.weights.push_back((i == -ib || i == ib) ? 0.5 * h : h);
  }
  return g;
}

}  // namespace detail_j

// sequences: the DPSS (unit energy, length N). m_q: order indices, size Q.
inline std::complex<double> tensor_j(const std::vector<std::vector<double>>& sequences,
                                     int q_order, double f, const std::vector<int>& m_q,
                                     double w, int grid_size) {
  if (q_order != 2 && q_order != 3)
    throw std::invalid_argument("tensor J oracle: only Q in {2,3}");
  if (static_cast<int>(m_q.size()) != q_order)
    throw std::invalid_argument("tensor J oracle: m_q size != Q");
  const auto g = detail_j::band_grid(grid_size, w);
  const int nb = static_cast<int>(g.freqs.size());

  std::complex<double> acc(0.0, 0.0);
  if (q_order == 2) {
    const auto& v1 = sequences[m_q[0]];
    const auto& v2 = sequences[m_q[1]];
    for (int i = 0; i < nb; ++i) {
      acc += g.weights[i] * dpswf_direct(v1, g.freqs[i]) * dpswf_direct(v2, f - g.freqs[i]);
    }
  } else {
    const auto& v1 = sequences[m_q[0]];
    const auto& v2 = sequences[m_q[1]];
    const auto& v3 = sequences[m_q[2]];
    // Cache the one-dimensional factors on the band nodes.
    std::vector<std::complex<double>> a(nb), b(nb);
    for (int i = 0; i < nb; ++i) {
      a[i] = dpswf_direct(v1, g.freqs[i]);
      b[i] = dpswf_direct(v2, g.freqs[i]);
    }
    for (int i1 = 0; i1 < nb; ++i1) {
      for (int i2 = 0; i2 < nb; ++i2) {
        acc += g.weights[i1] * g.weights[i2] * a[i1] * b[i2] *
               dpswf_direct(v3, f - g.freqs[i1] - g.freqs[i2]);
      }
    }
  }
  return acc;
}

}  // namespace oracle
