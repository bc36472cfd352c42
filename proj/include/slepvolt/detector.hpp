#pragma once

// Inner-product narrowband detection: raw responses against unit-energy
// probes, z-score normalization against a null ensemble, and the normalized
// cross-product matrix used to check probe orthogonality through a system.

#include <vector>

#include <Eigen/Dense>

namespace slepvolt {

// sum_t y_t p_t with the probe rescaled to unit energy first (the time-domain
// form of the band spectral inner product). Throws on length mismatch or an
// identically zero probe.
double inner_product_response(const std::vector<double>& output,
                              const std::vector<double>& probe);

// z_i = (alt_i - mean(null)) / sd(null), sample standard deviation (n-1).
// Requires at least two null values and nonzero null variance.
std::vector<double> normalize_against_null(const std::vector<double>& alternate,
                                           const std::vector<double>& null_values);

// Entry (j, j') = |<y_j, p_j'>| / sqrt(|<y_j, p_j> <y_j', p_j'>|), probes
// unit-rescaled. Throws if any self-response vanishes.
Eigen::MatrixXd cross_product_matrix(const std::vector<std::vector<double>>& responses,
                                     const std::vector<std::vector<double>>& probes);

double mean_offdiagonal(const Eigen::MatrixXd& m);

}  // namespace slepvolt
