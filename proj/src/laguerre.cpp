#include "slepvolt/laguerre.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slepvolt/io.hpp"

namespace slepvolt {

namespace {

constexpr double kConditionWarnThreshold = 1e12;
// Grid density used when fitting the third-order spectral target; 8x the lag
// support keeps the target well resolved around the 0.2 Hz shaping windows.
constexpr int kFineGridMultiple = 8;

// DFT of each basis row on a grid_size grid: entry (k, i) is
// sum_t g_{k,t} e^{-i 2 pi f_i t} with t = 0..n-1. The unit-delay phase of the
// realized kernels is omitted on purpose: it cancels in magnitude targets and
// factors out of the complex least-squares fits below.
Eigen::MatrixXcd basis_dft(const LaguerreBasis& basis, int grid_size) {
  const int k_count = basis.num_functions();
  const int n = basis.n_samples();
  if (grid_size < n)
    throw std::runtime_error("basis_dft: grid must have at least n bins");
  Eigen::MatrixXcd out(k_count, grid_size);
  std::vector<double> row(n);
  for (int k = 0; k < k_count; ++k) {
    for (int t = 0; t < n; ++t) row[t] = basis.functions(k, t);
    std::vector<cplx> spec = dft_forward_real(row, grid_size);
    for (int i = 0; i < grid_size; ++i) out(k, i) = spec[i];
  }
  return out;
}

double gaussian_window(double f_hz, double center_hz, double sigma_hz) {
  const double d = (f_hz - center_hz) / sigma_hz;
  return std::exp(-0.5 * d * d);
}

Eigen::VectorXd lag1_impulse(int n, double level) {
  Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
  target[0] = level;
  return target;
}

}  // namespace

double laguerre_polynomial(int k, double x) {
  if (k < 0) throw std::invalid_argument("laguerre_polynomial: order must be >= 0");
  if (!std::isfinite(x))
    throw std::invalid_argument("laguerre_polynomial: argument must be finite");
  double prev = 1.0;  // L_0
  if (k == 0) return prev;
  double cur = 1.0 - x;  // L_1
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 - x) * cur - j * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  if (!std::isfinite(cur))
    throw std::runtime_error("laguerre_polynomial: non-finite result at order " +
                             std::to_string(k));
  return cur;
}

LaguerreBasis build_basis(int num_functions, int n_samples, double sample_period) {
  if (num_functions < 1)
    throw std::invalid_argument("build_basis: need at least one function");
  if (n_samples < 1)
    throw std::invalid_argument("build_basis: need at least one sample");
  if (!(sample_period > 0.0) || !std::isfinite(sample_period))
    throw std::invalid_argument("build_basis: sample period must be positive");

  LaguerreBasis basis;
  basis.sample_period = sample_period;
  basis.orders.resize(num_functions);
  for (int k = 0; k < num_functions; ++k) basis.orders[k] = 100 * k + 1;
  const int max_order = basis.orders.back();

  basis.functions.resize(num_functions, n_samples);
  for (int t = 0; t < n_samples; ++t) {
    const double x = sample_period * t;
    // Single upward recurrence pass per sample, sampled at the kept orders.
    double below = 1.0;     // L_{j-1}
    double value = 1.0 - x; // L_j with j = 1
    int next_k = 0;
    for (int j = 1; j <= max_order; ++j) {
      if (next_k < num_functions && j == basis.orders[next_k]) {
        basis.functions(next_k, t) = value;
        ++next_k;
      }
      const double above = ((2.0 * j + 1.0 - x) * value - j * below) / (j + 1.0);
      below = value;
      value = above;
    }
  }
  if (!basis.functions.allFinite())
    throw std::runtime_error("build_basis: non-finite basis entry (order/argument overflow)");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis.functions.transpose());
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  basis.condition_estimate = (smin > 0.0) ? sv[0] / smin
                                          : std::numeric_limits<double>::infinity();
  basis.conditioning_warning =
      !(smin > 0.0) || basis.condition_estimate > kConditionWarnThreshold;
  return basis;
}

FitResult fit_time_kernel(const LaguerreBasis& basis, const Eigen::VectorXd& target) {
  if (target.size() != basis.n_samples())
    throw std::runtime_error("fit_time_kernel: target length must equal the basis sample count");
  const Eigen::MatrixXd design = basis.functions.transpose();  // n x K
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  FitResult fit;
  fit.coeffs = cod.solve(target);
  fit.rank = static_cast<int>(cod.rank());
  fit.residual_norm = (design * fit.coeffs - target).norm();
  return fit;
}

FitResult fit_order1_coeffs(const SpectrumGrid& target, const LaguerreBasis& basis) {
  target.check();
  const int n = basis.n_samples();
  if (target.size < n)
    throw std::runtime_error(
        "fit_order1_coeffs: grid needs at least as many bins as the kernel has lags");
  const std::vector<cplx> time = dft_inverse(target.value);
  Eigen::VectorXd kernel(n);
  for (int t = 0; t < n; ++t) kernel[t] = time[t].real();
  return fit_time_kernel(basis, kernel);
}

SystemSpec make_null_system(const LaguerreBasis& basis, double ho_scale,
                            const Geometry& geo, const SystemLevels& lv) {
  geo.check();
  if (!std::isfinite(ho_scale) || ho_scale < 0.0)
    throw std::invalid_argument("make_null_system: ho_scale must be finite and >= 0");
  // Flat spectra at every order: the inverse transform of a constant response
  // is a lone impulse at the first lag.
  SystemSpec spec;
  spec.label = "null";
  spec.ho_scale = ho_scale;
  const int n = basis.n_samples();
  spec.c1 = fit_time_kernel(basis, lag1_impulse(n, lv.gain1)).coeffs;
  spec.c2 = fit_time_kernel(basis, lag1_impulse(n, lv.a2)).coeffs;
  spec.c3 = fit_time_kernel(basis, lag1_impulse(n, lv.a3)).coeffs;
  return spec;
}

SystemSpec make_alternate_system(const LaguerreBasis& basis, double ho_scale,
                                 const AlternateOptions& opts, const Geometry& geo,
                                 const SystemLevels& lv) {
  geo.check();
  const SystemSpec null_spec = make_null_system(basis, ho_scale, geo, lv);
  const int n = basis.n_samples();
  const int k_count = basis.num_functions();

  SystemSpec spec;
  spec.label = "alternate";
  spec.ho_scale = ho_scale;
  spec.c2 = null_spec.c2;  // second order is shared between the two systems

  // Order 1: constant level plus a cubic spectral deviation, floored below the
  // knee at three tone spacings. The fit runs on the n-bin grid, whose strong
  // in-band ripple is the contrast the narrowband detector keys on.
  SpectrumGrid target1 = SpectrumGrid::zeros(n);
  const double knee_hz = 3.0 * geo.fr_hz;
  const double exponent = opts.decaying_bump ? -3.0 : 3.0;
  for (int i = 0; i < n; ++i) {
    const double f_hz = std::abs(geo.cps_to_hz(target1.freq[i]));
    const double base = (f_hz >= knee_hz) ? f_hz : geo.fr_hz;
    target1.value[i] = lv.gain1 + opts.delta_amplitude * std::pow(base, exponent);
  }
  spec.c1 = fit_order1_coeffs(target1, basis).coeffs;

  // Order 3: reshape the null system's diagonal response with two Gaussian
  // dips in the kernel-argument frequency, then refit. A dip at 2/3 Hz moves
  // the equal-argument response at a 2 Hz output; a dip at 2 Hz moves it at
  // 6 Hz. Complex least squares over stacked real/imaginary rows keeps the
  // coefficients real.
  const int grid = kFineGridMultiple * n;
  const Eigen::MatrixXcd gk = basis_dft(basis, grid);
  Eigen::MatrixXcd gk3(k_count, grid);
  for (int k = 0; k < k_count; ++k)
    for (int i = 0; i < grid; ++i) gk3(k, i) = gk(k, i) * gk(k, i) * gk(k, i);
  const Eigen::VectorXcd d_null =
      gk3.transpose() * null_spec.c3.cast<cplx>();

  Eigen::MatrixXd design(2 * grid, k_count);
  Eigen::VectorXd target3(2 * grid);
  for (int i = 0; i < grid; ++i) {
    const double f_hz = std::abs(geo.cps_to_hz(bin_frequency(i, grid)));
    const double shape = 1.0 +
                         opts.beta2 * gaussian_window(f_hz, 2.0, opts.sigma2) +
                         opts.beta6 * gaussian_window(f_hz, 2.0 / 3.0, opts.sigma6);
    const cplx t = d_null[i] * shape;
    for (int k = 0; k < k_count; ++k) {
      design(i, k) = gk3(k, i).real();
      design(grid + i, k) = gk3(k, i).imag();
    }
    target3[i] = t.real();
    target3[grid + i] = t.imag();
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  spec.c3 = cod.solve(target3);
  if (!spec.c3.allFinite())
    throw std::runtime_error("make_alternate_system: third-order fit produced non-finite coefficients");
  return spec;
}

SeparableSystem assemble_system(const LaguerreBasis& basis, const SystemSpec& spec) {
  const int k_count = basis.num_functions();
  if (spec.c1.size() != k_count || spec.c2.size() != k_count || spec.c3.size() != k_count)
    throw std::runtime_error("assemble_system: coefficient count must match the basis");
  if (!std::isfinite(spec.ho_scale))
    throw std::runtime_error("assemble_system: non-finite ho_scale");

  SeparableSystem sys;
  sys.num_inputs = 1;
  sys.terms.resize(1);
  const int n = basis.n_samples();
  std::vector<double> row(n);
  for (int k = 0; k < k_count; ++k) {
    for (int t = 0; t < n; ++t) row[t] = basis.functions(k, t);
    const double coeff_by_order[3] = {spec.c1[k], spec.ho_scale * spec.c2[k],
                                      spec.ho_scale * spec.c3[k]};
    for (int q = 1; q <= 3; ++q) {
      const double coeff = coeff_by_order[q - 1];
      if (coeff == 0.0) continue;
      SeparableTerm term;
      term.coefficient = coeff;
      term.channels.assign(q, 0);
      term.factors.assign(q, row);
      sys.terms[0].push_back(std::move(term));
    }
  }
  sys.check();
  return sys;
}

void write_system_csv(const std::string& path, const SystemSpec& spec,
                      const LaguerreBasis& basis) {
  const int k_count = basis.num_functions();
  if (spec.c1.size() != k_count || spec.c2.size() != k_count || spec.c3.size() != k_count)
    throw std::runtime_error("write_system_csv: coefficient count must match the basis");
  CsvTable table;
  table.schema = "system_coeffs";
  table.metadata = {{"label", spec.label},
                    {"ho_scale", format_g17(spec.ho_scale)},
                    {"num_functions", std::to_string(k_count)},
                    {"n_samples", std::to_string(basis.n_samples())},
                    {"sample_period", format_g17(basis.sample_period)}};
  table.columns = {"k", "c1", "c2", "c3"};
  for (int k = 0; k < k_count; ++k)
    table.add_row({static_cast<double>(k), spec.c1[k], spec.c2[k], spec.c3[k]});
  write_csv(path, table);
}

SystemSpec read_system_csv(const std::string& path, LaguerreBasis* basis_out) {
  const CsvTable table = read_csv(path);
  if (table.schema != "system_coeffs")
    throw std::runtime_error("read_system_csv: unexpected schema '" + table.schema + "'");
  const int k_count = static_cast<int>(metadata_number(table, "num_functions"));
  const int n_samples = static_cast<int>(metadata_number(table, "n_samples"));
  const double sample_period = metadata_number(table, "sample_period");
  if (static_cast<int>(table.rows.size()) != k_count)
    throw std::runtime_error("read_system_csv: row count does not match num_functions");

  SystemSpec spec;
  spec.label = metadata_string(table, "label");
  spec.ho_scale = metadata_number(table, "ho_scale");
  spec.c1.resize(k_count);
  spec.c2.resize(k_count);
  spec.c3.resize(k_count);
  const std::vector<double> ks = column(table, "k");
  const std::vector<double> c1 = column(table, "c1");
  const std::vector<double> c2 = column(table, "c2");
  const std::vector<double> c3 = column(table, "c3");
  for (int k = 0; k < k_count; ++k) {
    if (static_cast<int>(ks[k]) != k)
      throw std::runtime_error("read_system_csv: rows must be ordered by k");
    spec.c1[k] = c1[k];
    spec.c2[k] = c2[k];
    spec.c3[k] = c3[k];
  }
  if (basis_out != nullptr) *basis_out = build_basis(k_count, n_samples, sample_period);
  return spec;
}

}  // namespace slepvolt
