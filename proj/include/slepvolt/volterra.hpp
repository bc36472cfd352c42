#pragma once

// Separable Volterra systems: finite sums of rank-1 kernels, each a product
// of one-dimensional causal FIR factors. Lag indices start at 1 (strictly
// causal), so factors[i][j] weights input lag j+1 and an identity map is
// representable only as a unit delay.
//
// Two evaluation paths are kept deliberately: `evaluate_time_domain` runs the
// per-term work in an OpenMP parallel loop, `evaluate_time_domain_serial` is
// the plain reference used by the tests and the benchmark. Both accumulate
// per-term buffers and reduce them in term order, so their results are
// bit-identical.

#include <complex>
#include <vector>

#include "slepvolt/grid.hpp"

namespace slepvolt {

struct SeparableTerm {
  double coefficient = 1.0;
  std::vector<int> channels;                 // input channel per factor
  std::vector<std::vector<double>> factors;  // factors[i][j] = weight at lag j+1

  int order() const { return static_cast<int>(factors.size()); }
  int max_lag() const;
};

struct SeparableSystem {
  int num_inputs = 1;
  std::vector<double> dc_offset;                  // per output; empty means zero
  std::vector<std::vector<SeparableTerm>> terms;  // [output][term]

  int num_outputs() const { return static_cast<int>(terms.size()); }
  int max_order() const;
  int max_lag() const;
  double offset(int output) const;
  void check() const;
};

// phi[t] = sum_{lag=1..min(t, L)} factor[lag-1] * u[t-lag], t = 0..n_out-1.
// Input is treated as zero outside its support (zero initial conditions and
// zero after the record ends), so n_out may exceed the input length to
// capture the FIR tail.
std::vector<double> causal_filter(const std::vector<double>& factor,
                                  const std::vector<double>& u, int n_out);

// Output samples per channel; n_out < 0 means the input length.
std::vector<std::vector<double>> evaluate_time_domain(
    const SeparableSystem& sys, const std::vector<std::vector<double>>& inputs,
    int n_out = -1);
std::vector<std::vector<double>> evaluate_time_domain_serial(
    const SeparableSystem& sys, const std::vector<std::vector<double>>& inputs,
    int n_out = -1);

// result[q-1][output][t]: the order-q contribution alone (dc offsets excluded).
std::vector<std::vector<std::vector<double>>> evaluate_per_order(
    const SeparableSystem& sys, const std::vector<std::vector<double>>& inputs,
    int n_out = -1);

struct ResponseSpectrum {
  SpectrumGrid total;
  std::vector<SpectrumGrid> per_order;  // index q-1
};

// Spectrum of one output channel's complete response: the system is evaluated
// on n_in + max_lag samples so the FIR tail is included, making the per-order
// spectra exact transforms of the full finite-support responses. Requires
// grid_size >= n_in + max_lag and zero dc offsets.
ResponseSpectrum response_spectrum(const SeparableSystem& sys,
                                   const std::vector<std::vector<double>>& inputs,
                                   int grid_size, int output = 0);

// First-order frequency response output <- input on a uniform grid.
SpectrumGrid gfrf_order1(const SeparableSystem& sys, int grid_size, int output = 0,
                         int input = 0);

// Order-q response function on the equal-argument diagonal, parameterized by
// the output frequency f: value at bin f is Gamma^(q)(f/q, ..., f/q). Factors
// of every order-q term contribute regardless of channel, so this is chiefly
// meaningful for single-input systems.
SpectrumGrid gfrf_orderq_diagonal(const SeparableSystem& sys, int q, int grid_size,
                                  int output = 0);

// Full order-q tensor, flat row-major over (i_1, ..., i_q) DFT-order bins.
// Capped at grid_size <= 64; larger grids raise a capacity error pointing to
// the diagonal variant.
std::vector<cplx> gfrf_orderq_full(const SeparableSystem& sys, int q, int grid_size,
                                   int output = 0);

}  // namespace slepvolt
