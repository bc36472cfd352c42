#pragma once

// Discrete prolate spheroidal (Slepian) sequences and their wave functions.
//
// A DpssSet holds the k_count most band-concentrated unit-energy sequences of
// length n for half-bandwidth w = nw/n, ordered by decreasing concentration.
// Sequences come from the symmetric tridiagonal operator that commutes with
// the spectral concentration kernel; the concentration eigenvalues lambda_k
// are then recovered exactly by applying the sinc kernel quadratic form to
// each eigenvector, because the tridiagonal eigenvalues themselves are not
// the energy fractions.

#include <complex>
#include <vector>

#include "slepvolt/grid.hpp"

namespace slepvolt {

struct DpssSet {
  int n = 0;
  double nw = 0.0;
  double w = 0.0;                               // nw / n, cycles per sample
  std::vector<std::vector<double>> sequences;   // [k][t], k = 0 most concentrated
  std::vector<double> eigenvalues;              // in-band energy fractions
};

// Throws on invalid parameters (k_count > n, w outside (0, 1/2)) and on
// eigensolver failure (with the LAPACK diagnostic code).
DpssSet generate_dpss(int n, double nw, int k_count);

// Recompute each lambda_k as the trapezoid band integral of |V_k|^2.
// Requires grid_size >= 2n and at least 8 grid points inside (-w, w).
std::vector<double> eigenvalues_via_quadrature(const DpssSet& set, int grid_size);

// V_k(f) = sum_t v_t exp(-i 2 pi f t), single frequency (direct summation).
cplx dpswf_point(const std::vector<double>& sequence, double f);

// Same on a full uniform grid (zero-padded DFT).
SpectrumGrid evaluate_dpswf(const DpssSet& set, int k, int grid_size);

struct ModulatedSequence {
  std::vector<double> samples;
  double carrier = 0.0;           // cycles per sample
  bool aliasing_warning = false;  // carrier + w reaches or passes 1/2
};

// v_t * cos(2 pi carrier t); energy rescaling is the caller's job.
ModulatedSequence modulate(const DpssSet& set, int k, double carrier);

}  // namespace slepvolt
