#pragma once

// Least-squares Volterra kernel identification in the Laguerre dictionary:
// the regression uses one coefficient per basis function per order (the same
// diagonal-separable family the test systems are built from), so the design
// has 3K columns [phi_k, phi_k^2, phi_k^3] with phi_k the basis responses.

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "slepvolt/grid.hpp"
#include "slepvolt/laguerre.hpp"

namespace slepvolt {

struct IdentificationResult {
  Eigen::VectorXd c1, c2, c3;      // one estimate per basis function per order
  double residual_norm = 0.0;
  int rank = 0;
  double condition_estimate = 0.0; // singular value ratio of the design
  bool rank_deficient = false;     // minimum-norm solution flagged, never silent
};

// phi(k, t) = (g_k * u)(t): causal filter of the input by each basis row.
Eigen::MatrixXd basis_responses(const LaguerreBasis& basis,
                                const std::vector<double>& input);

// n x 3K design [phi | phi^2 | phi^3] (no constant column: zero-dc protocol).
Eigen::MatrixXd build_regression(const std::vector<double>& input,
                                 const LaguerreBasis& basis);

IdentificationResult least_squares_identify(const std::vector<double>& input,
                                            const std::vector<double>& output,
                                            const LaguerreBasis& basis);

// Order-1 transform of the identified kernel on a uniform grid: sum_k c1_k
// B_k(f) with B_k the basis-row DFT. A common delay phase is omitted; the
// magnitudes consumed downstream are unaffected.
SpectrumGrid identified_order1_gfrf(const IdentificationResult& result,
                                    const LaguerreBasis& basis, int grid_size);

// (f_hz, |Gamma^(1)(f)|) at the positive grid frequencies inside
// [center - w, center + w] (1e-9 Hz tolerance at the edges).
std::vector<std::pair<double, double>> inband_gfrf_statistics(
    const SpectrumGrid& gfrf, double w_hz, double center_hz, double sample_period);

// Mean magnitude over that list: the scalar detection statistic.
double band_mean_abs(const SpectrumGrid& gfrf, double w_hz, double center_hz,
                     double sample_period);

}  // namespace slepvolt
