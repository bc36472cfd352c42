#pragma once

// Frequency-grid plumbing shared by the whole library.
//
// Spectra live on uniform grids of G bins kept in DFT order: bin i carries
// the wrapped frequency wrap(i/G) in cycles per sample, with wrap mapping
// into [-1/2, 1/2). Keeping DFT order (rather than sorted frequencies) lets
// every FFT result be used in place; writers may sort on output.

#include <complex>
#include <vector>

namespace slepvolt {

using cplx = std::complex<double>;

// Map a frequency in cycles/sample into [-1/2, 1/2).
double wrap_frequency(double f);

// Wrapped frequency of bin i on a G-bin grid.
double bin_frequency(int i, int grid_size);

// Nearest bin (DFT order) for a frequency in cycles/sample.
int frequency_to_bin(double f, int grid_size);

struct SpectrumGrid {
  int size = 0;
  std::vector<double> freq;    // wrapped bin frequencies, DFT order
  std::vector<cplx> value;

  static SpectrumGrid zeros(int grid_size);
  // Throws if the frequency layout is not the uniform wrapped DFT-order grid.
  void check() const;
};

// Trapezoid weights for integrals over (-w, w): 1/G strictly inside the band,
// 1/(2G) at grid points landing exactly on the band edge, zero outside.
std::vector<double> band_weights(int grid_size, double w);

// Number of strictly positive weights (grid points the band integral sees).
int band_bin_count(const std::vector<double>& weights);

// FFT helpers (FFTW backend; plan creation is serialized internally, so these
// are safe to call from parallel regions).
std::vector<cplx> dft_forward(const std::vector<cplx>& x);
std::vector<cplx> dft_inverse(const std::vector<cplx>& x);  // includes the 1/G factor
// Forward DFT of a real sequence zero-padded (or truncated check: throws if
// longer than the grid) to grid_size bins.
std::vector<cplx> dft_forward_real(const std::vector<double>& x, int grid_size);

}  // namespace slepvolt
