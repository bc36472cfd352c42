#include "slepvolt/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace slepvolt {

double inner_product_response(const std::vector<double>& output,
                              const std::vector<double>& probe) {
  if (output.size() != probe.size())
    throw std::invalid_argument("inner_product_response: length mismatch");
  double dot = 0.0;
  double probe_energy = 0.0;
  for (std::size_t t = 0; t < probe.size(); ++t) {
    dot += output[t] * probe[t];
    probe_energy += probe[t] * probe[t];
  }
  if (probe_energy <= 0.0)
    throw std::runtime_error("inner_product_response: zero probe");
  return dot / std::sqrt(probe_energy);
}

std::vector<double> normalize_against_null(const std::vector<double>& alternate,
                                           const std::vector<double>& null_values) {
  const std::size_t n = null_values.size();
  if (n < 2)
    throw std::invalid_argument("normalize_against_null: need at least two null values");
  double mean = 0.0;
  for (double v : null_values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : null_values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0))
    throw std::runtime_error("normalize_against_null: degenerate null ensemble (zero variance)");
  std::vector<double> z(alternate.size());
  for (std::size_t i = 0; i < alternate.size(); ++i) z[i] = (alternate[i] - mean) / sd;
  return z;
}

Eigen::MatrixXd cross_product_matrix(const std::vector<std::vector<double>>& responses,
                                     const std::vector<std::vector<double>>& probes) {
  if (responses.size() != probes.size())
    throw std::invalid_argument("cross_product_matrix: response/probe count mismatch");
  const int k = static_cast<int>(responses.size());
  if (k == 0) throw std::invalid_argument("cross_product_matrix: empty inputs");

  Eigen::MatrixXd raw(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      raw(i, j) = std::abs(inner_product_response(responses[static_cast<std::size_t>(i)],
                                                  probes[static_cast<std::size_t>(j)]));
  for (int i = 0; i < k; ++i)
    if (!(raw(i, i) > 0.0))
      throw std::runtime_error("cross_product_matrix: vanishing self-response");

  Eigen::MatrixXd out(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out(i, j) = raw(i, j) / std::sqrt(raw(i, i) * raw(j, j));
  return out;
}

double mean_offdiagonal(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 2)
    throw std::invalid_argument("mean_offdiagonal: need a square matrix of size >= 2");
  double acc = 0.0;
  int count = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j) {
        acc += m(i, j);
        ++count;
      }
  return acc / count;
}

}  // namespace slepvolt
