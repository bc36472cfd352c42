#include "slepvolt/identify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slepvolt/volterra.hpp"

namespace slepvolt {

Eigen::MatrixXd basis_responses(const LaguerreBasis& basis,
                                const std::vector<double>& input) {
  const int n = basis.n_samples();
  if (static_cast<int>(input.size()) != n)
    throw std::invalid_argument("basis_responses: input length must match the basis");
  const int k_count = basis.num_functions();
  Eigen::MatrixXd phi(k_count, n);
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int k = 0; k < k_count; ++k) {
    for (int t = 0; t < n; ++t) row[static_cast<std::size_t>(t)] = basis.functions(k, t);
    const std::vector<double> f = causal_filter(row, input, n);
    for (int t = 0; t < n; ++t) phi(k, t) = f[static_cast<std::size_t>(t)];
  }
  return phi;
}

Eigen::MatrixXd build_regression(const std::vector<double>& input,
                                 const LaguerreBasis& basis) {
  const Eigen::MatrixXd phi = basis_responses(basis, input);
  const int k_count = basis.num_functions();
  const int n = basis.n_samples();
  Eigen::MatrixXd design(n, 3 * k_count);
  for (int k = 0; k < k_count; ++k)
    for (int t = 0; t < n; ++t) {
      const double p = phi(k, t);
      design(t, k) = p;
      design(t, k_count + k) = p * p;
      design(t, 2 * k_count + k) = p * p * p;
    }
  return design;
}

IdentificationResult least_squares_identify(const std::vector<double>& input,
                                            const std::vector<double>& output,
                                            const LaguerreBasis& basis) {
  const int n = basis.n_samples();
  if (input.size() != output.size())
    throw std::invalid_argument("least_squares_identify: input/output length mismatch");
  if (static_cast<int>(output.size()) != n)
    throw std::invalid_argument("least_squares_identify: record length must match the basis");

  const Eigen::MatrixXd design = build_regression(input, basis);
  Eigen::Map<const Eigen::VectorXd> y(output.data(), n);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd c = cod.solve(y);

  IdentificationResult result;
  const int k_count = basis.num_functions();
  result.c1 = c.segment(0, k_count);
  result.c2 = c.segment(k_count, k_count);
  result.c3 = c.segment(2 * k_count, k_count);
  result.residual_norm = (design * c - y).norm();
  result.rank = static_cast<int>(cod.rank());
  result.rank_deficient = result.rank < design.cols();

  // Condition diagnostic from the singular values (always reported; the
  // mixed-power design is routinely ill-scaled).
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  result.condition_estimate =
      (smin > 0.0) ? sv[0] / smin : std::numeric_limits<double>::infinity();
  return result;
}

SpectrumGrid identified_order1_gfrf(const IdentificationResult& result,
                                    const LaguerreBasis& basis, int grid_size) {
  const int k_count = basis.num_functions();
  if (result.c1.size() != k_count)
    throw std::invalid_argument("identified_order1_gfrf: coefficient count mismatch");
  const int n = basis.n_samples();
  if (grid_size < n)
    throw std::runtime_error("identified_order1_gfrf: grid must have at least n bins");

  std::vector<double> kernel(static_cast<std::size_t>(n), 0.0);
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int k = 0; k < k_count; ++k) acc += result.c1[k] * basis.functions(k, t);
    kernel[static_cast<std::size_t>(t)] = acc;
  }
  SpectrumGrid out = SpectrumGrid::zeros(grid_size);
  out.value = dft_forward_real(kernel, grid_size);
  return out;
}

std::vector<std::pair<double, double>> inband_gfrf_statistics(
    const SpectrumGrid& gfrf, double w_hz, double center_hz, double sample_period) {
  gfrf.check();
  if (!(w_hz > 0.0) || !(sample_period > 0.0))
    throw std::invalid_argument("inband_gfrf_statistics: w and sample period must be positive");
  const double lo = center_hz - w_hz - 1e-9;
  const double hi = center_hz + w_hz + 1e-9;
  std::vector<std::pair<double, double>> samples;
  for (int i = 0; i < gfrf.size; ++i) {
    const double f_hz = gfrf.freq[static_cast<std::size_t>(i)] / sample_period;
    if (f_hz >= lo && f_hz <= hi)
      samples.emplace_back(f_hz, std::abs(gfrf.value[static_cast<std::size_t>(i)]));
  }
  std::sort(samples.begin(), samples.end());
  if (samples.empty())
    throw std::runtime_error("inband_gfrf_statistics: no grid frequency falls in the band");
  return samples;
}

double band_mean_abs(const SpectrumGrid& gfrf, double w_hz, double center_hz,
                     double sample_period) {
  const auto samples = inband_gfrf_statistics(gfrf, w_hz, center_hz, sample_period);
  double acc = 0.0;
  for (const auto& s : samples) acc += s.second;
  return acc / static_cast<double>(samples.size());
}

}  // namespace slepvolt
