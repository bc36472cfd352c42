#pragma once

// Laguerre-polynomial kernel dictionary, least-squares spectral-target
// fitting, and construction of the paired cubic test systems (a "null"
// system with flat responses and an "alternate" system with an order-1
// spectral deviation and an elevated third-order diagonal).

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "slepvolt/geometry.hpp"
#include "slepvolt/grid.hpp"
#include "slepvolt/volterra.hpp"

namespace slepvolt {

// L_k(x) by the stable three-term recurrence
// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}. Throws if the result overflows.
double laguerre_polynomial(int k, double x);

struct LaguerreBasis {
  // functions(k, t) = L_{100k+1}(sample_period * t); each row is the lag
  // profile of one dictionary element (row index t corresponds to lag t+1).
  Eigen::MatrixXd functions;
  std::vector<int> orders;
  double sample_period = 0.0;
  double condition_estimate = 0.0;
  bool conditioning_warning = false;

  int num_functions() const { return static_cast<int>(functions.rows()); }
  int n_samples() const { return static_cast<int>(functions.cols()); }
};

LaguerreBasis build_basis(int num_functions, int n_samples, double sample_period);

struct FitResult {
  Eigen::VectorXd coeffs;
  double residual_norm = 0.0;
  int rank = 0;
};

// Least-squares fit of a length-n time kernel (lag profile) in the basis.
FitResult fit_time_kernel(const LaguerreBasis& basis, const Eigen::VectorXd& target);

// Target given as a frequency response on a uniform grid; it is inverse
// transformed to the length-n lag support (real part) before fitting.
FitResult fit_order1_coeffs(const SpectrumGrid& target, const LaguerreBasis& basis);

struct SystemSpec {
  std::string label;
  Eigen::VectorXd c1, c2, c3;   // one coefficient per basis function per order
  double ho_scale = 0.0;        // multiplies the order-2 and order-3 responses
};

struct AlternateOptions {
  double delta_amplitude = 1e-3;  // order-1 spectral deviation amplitude
  bool decaying_bump = false;     // use |f|^-3 (instead of |f|^3) in the deviation
  double beta2 = -4.5;            // third-order shaping weight, 2 Hz argument bump
  double beta6 = -5.0;            // third-order shaping weight, 2/3 Hz argument bump
  double sigma2 = 0.2;            // bump widths, Hz
  double sigma6 = 0.2;
};

// Flat-spectrum levels of the higher-order kernels shared by both systems.
struct SystemLevels {
  double gain1 = 0.75;
  double a2 = 200.0;
  double a3 = 40.0;
};

SystemSpec make_null_system(const LaguerreBasis& basis, double ho_scale,
                            const Geometry& geo = {}, const SystemLevels& lv = {});
SystemSpec make_alternate_system(const LaguerreBasis& basis, double ho_scale,
                                 const AlternateOptions& opts = {},
                                 const Geometry& geo = {}, const SystemLevels& lv = {});

// Realize a coefficient spec as an evaluable single-input separable system:
// 3 * num_functions rank-1 terms, orders 2-3 scaled by ho_scale (ho_scale = 0
// yields a purely linear system).
SeparableSystem assemble_system(const LaguerreBasis& basis, const SystemSpec& spec);

void write_system_csv(const std::string& path, const SystemSpec& spec,
                      const LaguerreBasis& basis);
// Returns the spec; *basis_out (if non-null) receives the basis rebuilt from
// the file's metadata.
SystemSpec read_system_csv(const std::string& path, LaguerreBasis* basis_out = nullptr);

}  // namespace slepvolt
