#pragma once

// Reference generator for discrete prolate spheroidal sequences, used only by
// tests. Solves the dense symmetric spectral-concentration eigenproblem
//
//   S v = lambda v,   S[t,t'] = sin(2*pi*W*(t-t')) / (pi*(t-t')),  S[t,t] = 2W,
//
// directly. This is numerically safe only for small N (eigenvalues cluster
// exponentially close to 1), which is why the production path uses the
// commuting tridiagonal operator instead. Kept deliberately independent of the
// production code: no shared helpers, direct dense eigensolve.
//
// Frozen reference implementation; do not modify when production code changes.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

struct DenseDpssResult {
  std::vector<std::vector<double>> sequences;  // K x N, unit energy
  std::vector<double> eigenvalues;             // K, descending
};

inline DenseDpssResult dense_dpss(int n, double nw, int k_count) {
  if (n <= 0 || k_count <= 0 || k_count > n)
    throw std::invalid_argument("dense_dpss: bad (n, k)");
  const double w = nw / static_cast<double>(n);
  if (!(w > 0.0 && w < 0.5))
    throw std::invalid_argument("dense_dpss: half-bandwidth out of (0, 1/2)");

  Eigen::MatrixXd s(n, n);
  const double pi = 3.14159265358979323846;
  for (int t = 0; t < n; ++t) {
    for (int tp = 0; tp < n; ++tp) {
      const int d = t - tp;
      s(t, tp) = (d == 0) ? 2.0 * w : std::sin(2.0 * pi * w * d) / (pi * d);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense_dpss: eigensolver failed");

  DenseDpssResult out;
  out.sequences.resize(k_count);
  out.eigenvalues.resize(k_count);
  // Eigen returns ascending eigenvalues; take the top k_count, descending.
  for (int k = 0; k < k_count; ++k) {
    const int col = n - 1 - k;
    out.eigenvalues[k] = es.eigenvalues()(col);
    Eigen::VectorXd v = es.eigenvectors().col(col);
    v.normalize();
    // Sign convention: first element of nonnegligible magnitude is positive.
    for (int t = 0; t < n; ++t) {
      if (std::abs(v(t)) > 1e-12) {
        if (v(t) < 0.0) v = -v;
        break;
      }
    }
    out.sequences[k].assign(v.data(), v.data() + n);
  }
  return out;
}

}  // namespace oracle
