#include "slepvolt/slepian.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slepvolt {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Exact in-band energy of a unit-energy sequence: v' S v with the sinc kernel
// S(d) = sin(2 pi w d) / (pi d), S(0) = 2w. Uses the Toeplitz structure via
// the autocorrelation of v.
double band_energy(const std::vector<double>& v, double w) {
  const int n = static_cast<int>(v.size());
  double acc = 0.0;
  for (int d = 0; d < n; ++d) {
    double r = 0.0;
    for (int t = 0; t + d < n; ++t) r += v[t] * v[t + d];
    const double kern = (d == 0) ? 2.0 * w : std::sin(2.0 * kPi * w * d) / (kPi * d);
    acc += (d == 0 ? 1.0 : 2.0) * kern * r;
  }
  return acc;
}
}  // namespace

DpssSet generate_dpss(int n, double nw, int k_count) {
  if (n < 2) throw std::invalid_argument("generate_dpss: need n >= 2");
  if (k_count < 1) throw std::invalid_argument("generate_dpss: need k_count >= 1");
  if (k_count > n)
    throw std::invalid_argument("generate_dpss: more sequences requested than length");
  const double w = nw / n;
  if (!(w > 0.0) || w >= 0.5)
    throw std::invalid_argument("generate_dpss: nw/n must lie in (0, 1/2)");

  // Tridiagonal operator commuting with the concentration kernel.
  std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
  const double c = std::cos(2.0 * kPi * w);
  for (int t = 0; t < n; ++t) {
    const double half = 0.5 * (n - 1 - 2 * t);
    diag[t] = half * half * c;
  }
  for (int t = 0; t + 1 < n; ++t)
    off[t] = 0.5 * static_cast<double>(t + 1) * static_cast<double>(n - 1 - t);

  lapack_int found = 0;
  std::vector<double> evals(n);
  std::vector<double> z(static_cast<std::size_t>(n) * k_count);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(k_count));
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0,
      n - k_count + 1, n, 0.0, &found, evals.data(), z.data(), n, isuppz.data());
  if (info != 0)
    throw std::runtime_error("generate_dpss: eigensolver failed, LAPACK info = " +
                             std::to_string(info));
  if (found != k_count)
    throw std::runtime_error("generate_dpss: eigensolver returned " +
                             std::to_string(found) + " of " + std::to_string(k_count) +
                             " requested eigenpairs");

  DpssSet set;
  set.n = n;
  set.nw = nw;
  set.w = w;
  set.sequences.resize(k_count);
  set.eigenvalues.resize(k_count);

  for (int k = 0; k < k_count; ++k) {
    // Column (k_count-1-k) holds the (k+1)-th largest tridiagonal eigenvalue.
    const double* col = z.data() + static_cast<std::size_t>(k_count - 1 - k) * n;
    std::vector<double> v(col, col + n);

    // The operator commutes with time reversal, so eigenvectors have definite
    // parity (-1)^k; project onto it to remove numerical asymmetry.
    const double parity = (k % 2 == 0) ? 1.0 : -1.0;
    std::vector<double> sym(n);
    double norm2 = 0.0;
    for (int t = 0; t < n; ++t) {
      sym[t] = 0.5 * (v[t] + parity * v[n - 1 - t]);
      norm2 += sym[t] * sym[t];
    }
    if (!(norm2 > 0.0))
      throw std::runtime_error("generate_dpss: degenerate eigenvector");
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : sym) x *= inv;

    // Deterministic sign: first element of visible magnitude is positive.
    int t0 = 0;
    while (t0 < n && std::abs(sym[t0]) <= 1e-12) ++t0;
    if (t0 < n && sym[t0] < 0.0)
      for (double& x : sym) x = -x;

    set.eigenvalues[k] = band_energy(sym, w);
    set.sequences[k] = std::move(sym);
  }
  return set;
}

std::vector<double> eigenvalues_via_quadrature(const DpssSet& set, int grid_size) {
  if (grid_size < 2 * set.n)
    throw std::runtime_error(
        "eigenvalues_via_quadrature: grid must oversample the sequences (>= 2n)");
  const std::vector<double> weights = band_weights(grid_size, set.w);
  if (band_bin_count(weights) < 8)
    throw std::runtime_error(
        "eigenvalues_via_quadrature: fewer than 8 grid points resolve the band");
  std::vector<double> out;
  out.reserve(set.sequences.size());
  for (const auto& seq : set.sequences) {
    const std::vector<cplx> spec = dft_forward_real(seq, grid_size);
    double acc = 0.0;
    for (int i = 0; i < grid_size; ++i)
      if (weights[i] > 0.0) acc += weights[i] * std::norm(spec[i]);
    out.push_back(acc);
  }
  return out;
}

cplx dpswf_point(const std::vector<double>& sequence, double f) {
  cplx acc(0.0, 0.0);
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const double phase = -2.0 * kPi * f * static_cast<double>(t);
    acc += sequence[t] * cplx(std::cos(phase), std::sin(phase));
  }
  return acc;
}

SpectrumGrid evaluate_dpswf(const DpssSet& set, int k, int grid_size) {
  if (k < 0 || k >= static_cast<int>(set.sequences.size()))
    throw std::out_of_range("evaluate_dpswf: order out of range");
  if (grid_size < 2 * set.n)
    throw std::runtime_error("evaluate_dpswf: grid must oversample the sequence (>= 2n)");
  SpectrumGrid g = SpectrumGrid::zeros(grid_size);
  g.value = dft_forward_real(set.sequences[k], grid_size);
  return g;
}

ModulatedSequence modulate(const DpssSet& set, int k, double carrier) {
  if (k < 0 || k >= static_cast<int>(set.sequences.size()))
    throw std::out_of_range("modulate: order out of range");
  if (carrier < 0.0 || carrier >= 0.5)
    throw std::invalid_argument("modulate: carrier must lie in [0, 1/2)");
  ModulatedSequence out;
  out.carrier = carrier;
  out.aliasing_warning = (carrier + set.w >= 0.5);
  const auto& v = set.sequences[k];
  out.samples.resize(v.size());
  for (std::size_t t = 0; t < v.size(); ++t)
    out.samples[t] = v[t] * std::cos(2.0 * kPi * carrier * static_cast<double>(t));
  return out;
}

}  // namespace slepvolt
