#include "slepvolt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "slepvolt/rng.hpp"

namespace slepvolt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMinBandBins = 8;
constexpr long long kExhaustiveTupleCap = 10000;
constexpr int kSampledTupleDraws = 25;

// Bins strictly inside (-w, w); on-grid +-w bins are excluded because the
// supremum domain is the open band.
std::vector<int> open_band_bins(int grid_size, double w) {
  std::vector<int> bins;
  for (int i = 0; i < grid_size; ++i)
    if (std::abs(bin_frequency(i, grid_size)) < w - 1e-12) bins.push_back(i);
  return bins;
}

// Bins inside [-w, w] with on-grid edges included (conservative for maxima).
std::vector<int> closed_band_bins(int grid_size, double w) {
  std::vector<int> bins;
  for (int i = 0; i < grid_size; ++i)
    if (std::abs(bin_frequency(i, grid_size)) <= w + 1e-12) bins.push_back(i);
  return bins;
}

void check_j_arguments(const DpssSet& set, int q, const std::vector<int>& m_q,
                       int grid_size) {
  if (q < 2) throw std::invalid_argument("compute_j: order must be >= 2");
  if (static_cast<int>(m_q.size()) != q)
    throw std::invalid_argument("compute_j: tuple size must equal the order");
  for (int k : m_q)
    if (k < 0 || k >= static_cast<int>(set.sequences.size()))
      throw std::invalid_argument("compute_j: sequence order out of range");
  if (grid_size < 2 * set.n)
    throw std::runtime_error("compute_j: grid under-resolved, need >= 2n bins");
  if (static_cast<int>(open_band_bins(grid_size, set.w).size()) < kMinBandBins)
    throw std::runtime_error("compute_j: grid under-resolved, band needs >= " +
                             std::to_string(kMinBandBins) + " bins");
}

// Per-order spectral ingredients on one grid, reused across tuples. The
// `signed_` arrays drive J itself; the `abs_` arrays drive the envelope.
struct JWorkspace {
  int grid_size = 0;
  std::vector<double> weights;
  std::vector<int> open_bins;
  std::vector<std::vector<cplx>> inner_dft;      // DFT(weights .* V_k)
  std::vector<std::vector<cplx>> outer_dft;      // DFT(V_k)
  std::vector<std::vector<cplx>> inner_abs_dft;  // DFT(weights .* |V_k|)
  std::vector<std::vector<cplx>> outer_abs_dft;  // DFT(|V_k|)
};

JWorkspace make_workspace(const DpssSet& set, int grid_size, bool with_abs) {
  JWorkspace ws;
  ws.grid_size = grid_size;
  ws.weights = band_weights(grid_size, set.w);
  ws.open_bins = open_band_bins(grid_size, set.w);
  const int k_count = static_cast<int>(set.sequences.size());
  ws.inner_dft.resize(k_count);
  ws.outer_dft.resize(k_count);
  if (with_abs) {
    ws.inner_abs_dft.resize(k_count);
    ws.outer_abs_dft.resize(k_count);
  }
  std::vector<cplx> buf(grid_size);
  for (int k = 0; k < k_count; ++k) {
    const SpectrumGrid v = evaluate_dpswf(set, k, grid_size);
    for (int i = 0; i < grid_size; ++i) buf[i] = ws.weights[i] * v.value[i];
    ws.inner_dft[k] = dft_forward(buf);
    ws.outer_dft[k] = dft_forward(v.value);
    if (!with_abs) continue;
    for (int i = 0; i < grid_size; ++i) buf[i] = ws.weights[i] * std::abs(v.value[i]);
    ws.inner_abs_dft[k] = dft_forward(buf);
    for (int i = 0; i < grid_size; ++i) buf[i] = std::abs(v.value[i]);
    ws.outer_abs_dft[k] = dft_forward(buf);
  }
  return ws;
}

// Iterated circular convolution of the Q-1 weighted inner factors with the
// outer factor, assembled in the DFT domain.
std::vector<cplx> convolve_tuple(const JWorkspace& ws,
                                 const std::vector<std::vector<cplx>>& inner,
                                 const std::vector<std::vector<cplx>>& outer,
                                 const std::vector<int>& m_q) {
  const int q = static_cast<int>(m_q.size());
  std::vector<cplx> prod = inner[m_q[0]];
  for (int j = 1; j < q - 1; ++j) {
    const auto& next = inner[m_q[j]];
    for (int i = 0; i < ws.grid_size; ++i) prod[i] *= next[i];
  }
  const auto& last = outer[m_q[q - 1]];
  for (int i = 0; i < ws.grid_size; ++i) prod[i] *= last[i];
  return dft_inverse(prod);
}

double band_max_abs(const std::vector<cplx>& grid, const std::vector<int>& bins) {
  double best = 0.0;
  for (int i : bins) best = std::max(best, std::abs(grid[i]));
  return best;
}

std::vector<int> draw_tuple(std::mt19937_64& eng, int q, int m) {
  std::vector<int> tuple(q);
  for (int& t : tuple) t = uniform_index(eng, m);
  return tuple;
}

// F(f) = sum_lag factor[lag-1] e^{-i 2 pi f lag} at one frequency.
cplx factor_point(const std::vector<double>& factor, double f) {
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < factor.size(); ++j) {
    const double ph = -2.0 * kPi * f * static_cast<double>(j + 1);
    acc += factor[j] * cplx(std::cos(ph), std::sin(ph));
  }
  return acc;
}

// F on a full uniform grid: DFT of the factor shifted to start at lag 1.
std::vector<cplx> factor_grid(const std::vector<double>& factor, int grid_size) {
  std::vector<double> shifted(factor.size() + 1, 0.0);
  std::copy(factor.begin(), factor.end(), shifted.begin() + 1);
  return dft_forward_real(shifted, grid_size);
}

struct OrderTerms {
  std::vector<double> coeff;
  std::vector<const SeparableTerm*> terms;
  int count() const { return static_cast<int>(terms.size()); }
};

// Terms of one output channel bucketed by order (index q-1).
std::vector<OrderTerms> bucket_terms(const SeparableSystem& sys, int output) {
  std::vector<OrderTerms> buckets(static_cast<std::size_t>(sys.max_order()));
  for (const SeparableTerm& term : sys.terms[output]) {
    auto& b = buckets[static_cast<std::size_t>(term.order() - 1)];
    b.coeff.push_back(term.coefficient);
    b.terms.push_back(&term);
  }
  return buckets;
}

// Factor transforms of every term in a bucket on the axis nodes given by
// `freqs`; row = term, column = node.
Eigen::MatrixXcd bucket_axis_values(const OrderTerms& bucket, int axis,
                                    const std::vector<double>& freqs) {
  Eigen::MatrixXcd out(bucket.count(), static_cast<int>(freqs.size()));
  for (int t = 0; t < bucket.count(); ++t) {
    const auto& factor = bucket.terms[static_cast<std::size_t>(t)]->factors[axis];
    for (std::size_t i = 0; i < freqs.size(); ++i)
      out(t, static_cast<int>(i)) = factor_point(factor, freqs[i]);
  }
  return out;
}

std::vector<double> grid_freqs(int grid_size) {
  std::vector<double> f(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) f[static_cast<std::size_t>(i)] = bin_frequency(i, grid_size);
  return f;
}

// Uniform nodes covering [lo, hi] plus a one-node halo on each side (so
// centered differences at every interior node stay inside the evaluated set).
struct BoxAxis {
  std::vector<double> nodes;  // size count + 2, nodes[1..count] cover [lo, hi]
  double step = 0.0;
  int count = 0;
};

BoxAxis box_axis(double lo, double hi, int count) {
  BoxAxis axis;
  axis.count = count;
  axis.step = (hi - lo) / (count - 1);
  axis.nodes.resize(static_cast<std::size_t>(count) + 2);
  for (int i = -1; i <= count; ++i)
    axis.nodes[static_cast<std::size_t>(i + 1)] = lo + i * axis.step;
  return axis;
}

// Gradient-difference supremum sup ||(d_j Gamma - d_q Gamma)_{j<q}||_2 over
// the box [-w, w]^{q-1} x [-qw, qw], centered differences on the node lattice.
double gradient_difference_sup(const OrderTerms& bucket, int q, double w,
                               int nodes_per_axis) {
  if (bucket.count() == 0) return 0.0;
  std::vector<BoxAxis> axes;
  for (int j = 0; j < q - 1; ++j) axes.push_back(box_axis(-w, w, nodes_per_axis));
  axes.push_back(box_axis(-q * w, q * w, nodes_per_axis));

  // Per-term factor values on each axis's (haloed) nodes.
  std::vector<Eigen::MatrixXcd> fv(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j)
    fv[static_cast<std::size_t>(j)] =
        bucket_axis_values(bucket, j, axes[static_cast<std::size_t>(j)].nodes);

  const int n = nodes_per_axis + 2;  // haloed nodes per axis
  auto value_at = [&](const std::vector<int>& idx) {
    cplx acc(0.0, 0.0);
    for (int t = 0; t < bucket.count(); ++t) {
      cplx prod(bucket.coeff[static_cast<std::size_t>(t)], 0.0);
      for (int j = 0; j < q; ++j) prod *= fv[static_cast<std::size_t>(j)](t, idx[static_cast<std::size_t>(j)]);
      acc += prod;
    }
    return acc;
  };

  // Lattice of Gamma values over the haloed box (q <= 3 keeps this small).
  std::vector<cplx> lattice;
  std::vector<int> strides(static_cast<std::size_t>(q));
  long long total = 1;
  for (int j = q - 1; j >= 0; --j) {
    strides[static_cast<std::size_t>(j)] = static_cast<int>(total);
    total *= n;
  }
  lattice.resize(static_cast<std::size_t>(total));
  std::vector<int> idx(static_cast<std::size_t>(q), 0);
  for (long long flat = 0; flat < total; ++flat) {
    long long rem = flat;
    for (int j = 0; j < q; ++j) {
      idx[static_cast<std::size_t>(j)] = static_cast<int>(rem / strides[static_cast<std::size_t>(j)]);
      rem %= strides[static_cast<std::size_t>(j)];
    }
    lattice[static_cast<std::size_t>(flat)] = value_at(idx);
  }

  double best = 0.0;
  for (long long flat = 0; flat < total; ++flat) {
    long long rem = flat;
    bool interior = true;
    for (int j = 0; j < q; ++j) {
      idx[static_cast<std::size_t>(j)] = static_cast<int>(rem / strides[static_cast<std::size_t>(j)]);
      rem %= strides[static_cast<std::size_t>(j)];
      if (idx[static_cast<std::size_t>(j)] == 0 || idx[static_cast<std::size_t>(j)] == n - 1)
        interior = false;
    }
    if (!interior) continue;
    std::vector<cplx> partials(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) {
      const long long up = flat + strides[static_cast<std::size_t>(j)];
      const long long dn = flat - strides[static_cast<std::size_t>(j)];
      partials[static_cast<std::size_t>(j)] =
          (lattice[static_cast<std::size_t>(up)] - lattice[static_cast<std::size_t>(dn)]) /
          (2.0 * axes[static_cast<std::size_t>(j)].step);
    }
    double norm_sq = 0.0;
    for (int j = 0; j < q - 1; ++j) norm_sq += std::norm(partials[static_cast<std::size_t>(j)] - partials[static_cast<std::size_t>(q - 1)]);
    best = std::max(best, std::sqrt(norm_sq));
  }
  return best;
}

}  // namespace

cplx compute_j(const DpssSet& set, int q, double f, const std::vector<int>& m_q,
               int grid_size) {
  check_j_arguments(set, q, m_q, grid_size);
  if (!(f > -0.5 && f < 0.5))
    throw std::invalid_argument("compute_j: f must lie in (-1/2, 1/2)");
  const std::vector<double> weights = band_weights(grid_size, set.w);

  // Joint weight of sum f_j: the (Q-2)-fold convolution of the weighted
  // in-band factors, assembled in the DFT domain.
  std::vector<cplx> prod;
  std::vector<cplx> buf(static_cast<std::size_t>(grid_size));
  for (int j = 0; j < q - 1; ++j) {
    const SpectrumGrid v = evaluate_dpswf(set, m_q[static_cast<std::size_t>(j)], grid_size);
    for (int i = 0; i < grid_size; ++i) buf[static_cast<std::size_t>(i)] = weights[static_cast<std::size_t>(i)] * v.value[static_cast<std::size_t>(i)];
    std::vector<cplx> d = dft_forward(buf);
    if (j == 0) {
      prod = std::move(d);
    } else {
      for (int i = 0; i < grid_size; ++i) prod[static_cast<std::size_t>(i)] *= d[static_cast<std::size_t>(i)];
    }
  }
  const std::vector<cplx> joint = dft_inverse(prod);

  // Outer wave function evaluated exactly at the shifted frequency (periodic
  // in f, so no wrapping is needed).
  const std::vector<double>& outer = set.sequences[static_cast<std::size_t>(m_q[static_cast<std::size_t>(q - 1)])];
  cplx acc(0.0, 0.0);
  for (int s = 0; s < grid_size; ++s) {
    const cplx a = joint[static_cast<std::size_t>(s)];
    if (a == cplx(0.0, 0.0)) continue;
    acc += a * dpswf_point(outer, f - bin_frequency(s, grid_size));
  }
  return acc;
}

std::vector<cplx> compute_j_grid(const DpssSet& set, int q,
                                 const std::vector<int>& m_q, int grid_size) {
  check_j_arguments(set, q, m_q, grid_size);
  JWorkspace ws = make_workspace(set, grid_size, /*with_abs=*/false);
  return convolve_tuple(ws, ws.inner_dft, ws.outer_dft, m_q);
}

double compute_jb_tuple(const DpssSet& set, const std::vector<int>& m_q,
                        int grid_size) {
  const int q = static_cast<int>(m_q.size());
  check_j_arguments(set, q, m_q, grid_size);
  JWorkspace ws = make_workspace(set, grid_size, /*with_abs=*/true);
  const std::vector<cplx> env =
      convolve_tuple(ws, ws.inner_abs_dft, ws.outer_abs_dft, m_q);
  return band_max_abs(env, ws.open_bins);
}

JBoundResult compute_jb(const DpssSet& set, int q, int m, int grid_size,
                        std::uint64_t seed) {
  if (m < 1 || m > static_cast<int>(set.sequences.size()))
    throw std::invalid_argument("compute_jb: m out of range");
  check_j_arguments(set, q, std::vector<int>(static_cast<std::size_t>(q), 0), grid_size);
  JWorkspace ws = make_workspace(set, grid_size, /*with_abs=*/true);

  long long tuple_count = 1;
  for (int j = 0; j < q && tuple_count <= kExhaustiveTupleCap; ++j) tuple_count *= m;

  JBoundResult result;
  if (tuple_count <= kExhaustiveTupleCap) {
    std::vector<int> tuple(static_cast<std::size_t>(q), 0);
    while (true) {
      const std::vector<cplx> env =
          convolve_tuple(ws, ws.inner_abs_dft, ws.outer_abs_dft, tuple);
      result.value = std::max(result.value, band_max_abs(env, ws.open_bins));
      int pos = q - 1;
      while (pos >= 0 && ++tuple[static_cast<std::size_t>(pos)] == m) tuple[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
  } else {
    result.sampled = true;
    for (int draw = 0; draw < kSampledTupleDraws; ++draw) {
      auto eng = make_engine(derive_seed(seed, {static_cast<std::uint64_t>(q),
                                                static_cast<std::uint64_t>(draw)}));
      const std::vector<int> tuple = draw_tuple(eng, q, m);
      const std::vector<cplx> env =
          convolve_tuple(ws, ws.inner_abs_dft, ws.outer_abs_dft, tuple);
      result.value = std::max(result.value, band_max_abs(env, ws.open_bins));
    }
  }
  return result;
}

double jb_closed_form(int q, double w) {
  if (q < 2) throw std::invalid_argument("jb_closed_form: order must be >= 2");
  if (!(w > 0.0 && w <= 0.5))
    throw std::invalid_argument("jb_closed_form: w must lie in (0, 1/2]");
  return std::pow(2.0 * w, 0.5 * (q - 2));
}

double bound_a(int q, int m, double lambda_min, double v_m_star, double gamma_star) {
  if (q < 1 || m < 1) throw std::invalid_argument("bound_a: q and m must be >= 1");
  if (!(lambda_min > 0.0 && lambda_min <= 1.0))
    throw std::invalid_argument("bound_a: lambda_min must lie in (0, 1]");
  if (v_m_star < 0.0 || gamma_star < 0.0)
    throw std::invalid_argument("bound_a: suprema must be nonnegative");
  return std::pow(1.0 - lambda_min, 0.5 * (q - 1)) * v_m_star *
         std::pow(static_cast<double>(m), q) * gamma_star;
}

double bound_b(int q, int m, double w, double gamma_prime_star, double j_b) {
  if (q < 1 || m < 1) throw std::invalid_argument("bound_b: q and m must be >= 1");
  if (!(w > 0.0 && w <= 0.5))
    throw std::invalid_argument("bound_b: w must lie in (0, 1/2]");
  if (gamma_prime_star < 0.0 || j_b < 0.0)
    throw std::invalid_argument("bound_b: inputs must be nonnegative");
  return std::pow(w, q - 1) * gamma_prime_star *
         std::pow(static_cast<double>(m), q) * j_b;
}

double SupremaReport::order_entry(const std::vector<double>& v, int q) {
  if (q < 1) throw std::invalid_argument("suprema: order must be >= 1");
  if (q > static_cast<int>(v.size())) return 0.0;
  return v[static_cast<std::size_t>(q - 1)];
}

BoundReport bound_c(int q, int m, double w, const SupremaReport& suprema, double f,
                    std::optional<double> j_b_measured,
                    std::optional<double> epsilon) {
  if (q < 2) throw std::invalid_argument("bound_c: order must be >= 2");
  const double closed = jb_closed_form(q, w);
  BoundReport report;
  report.order = q;
  report.frequency = f;
  report.j_b_closed_form = closed;
  report.j_b = j_b_measured.value_or(closed);
  report.delta_prime = std::max(0.0, report.j_b - closed);
  report.bound_a = bound_a(q, m, suprema.lambda_min, suprema.v_m_star,
                           SupremaReport::order_entry(suprema.gamma_star, q));
  report.bound_b = bound_b(q, m, w, SupremaReport::order_entry(suprema.gamma_prime_star, q),
                           report.j_b);
  const double in_band = (closed + report.delta_prime) *
                         std::pow(static_cast<double>(m), q) *
                         SupremaReport::order_entry(suprema.gamma_double_star, q);
  report.bound_c = report.bound_a + report.bound_b + in_band;
  report.suppression_scale = std::pow(w, 0.5 * (q - 2));
  report.epsilon = epsilon;
  return report;
}

double series_tail(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("series_tail: non-finite argument");
  if (std::abs(x) > 0.5) return std::expm1(x) - x - 0.5 * x * x;
  double acc = 0.0;
  double term = x * x * x / 6.0;  // j = 3
  for (int j = 3; j < 200; ++j) {
    acc += term;
    term *= x / (j + 1);
    if (std::abs(term) < 1e-18 * (std::abs(acc) + 1e-300)) break;
  }
  return acc;
}

double truncation_epsilon(double alpha, double beta, double gamma, int m, double w,
                        double lambda_min, double v_m_star) {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0 || v_m_star < 0.0)
    throw std::invalid_argument("truncation_epsilon: constants must be nonnegative");
  if (m < 1) throw std::invalid_argument("truncation_epsilon: m must be >= 1");
  if (!(w > 0.0 && w < 0.5))
    throw std::invalid_argument("truncation_epsilon: w must lie in (0, 1/2)");
  if (!(lambda_min > 0.0 && lambda_min <= 1.0))
    throw std::invalid_argument("truncation_epsilon: lambda_min must lie in (0, 1]");
  const double md = static_cast<double>(m);
  const double x1 = alpha * md * std::sqrt(std::max(0.0, 1.0 - lambda_min));
  const double x2 = std::sqrt(2.0) * gamma * md * std::pow(w, 1.5);
  const double x3 = std::sqrt(2.0 * w) * beta * md;
  return v_m_star * series_tail(x1) + series_tail(x2) / (w * w * std::sqrt(2.0)) +
         series_tail(x3) / (2.0 * w);
}

double inner_product_bound(int m, double w, const std::vector<double>& lambda_values,
                           const SupremaReport& suprema, double epsilon, int m_prime) {
  if (m < 1) throw std::invalid_argument("inner_product_bound: m must be >= 1");
  if (!(w > 0.0 && w < 0.5))
    throw std::invalid_argument("inner_product_bound: w must lie in (0, 1/2)");
  if (m_prime < 0 || m_prime >= static_cast<int>(lambda_values.size()))
    throw std::invalid_argument("inner_product_bound: m_prime out of range");
  if (epsilon < 0.0)
    throw std::invalid_argument("inner_product_bound: epsilon must be nonnegative");
  const double md = static_cast<double>(m);
  const double lam_probe = lambda_values[static_cast<std::size_t>(m_prime)];
  return epsilon * std::sqrt(suprema.lambda_min) +
         w * md * suprema.gamma1_prime_double_star +
         md * SupremaReport::order_entry(suprema.gamma_star, 1) *
             (1.0 - suprema.lambda_min) +
         (std::sqrt(2.0 * w) + std::sqrt(std::max(0.0, 1.0 - lam_probe))) * md * md *
             SupremaReport::order_entry(suprema.gamma_star, 2);
}

SupremaReport measure_suprema(const SeparableSystem& sys, const DpssSet& set,
                              const SupremaGrids& grids, int output) {
  sys.check();
  if (output < 0 || output >= sys.num_outputs())
    throw std::invalid_argument("measure_suprema: output out of range");
  if (set.sequences.empty())
    throw std::invalid_argument("measure_suprema: empty sequence set");
  const int max_order = sys.max_order();
  if (max_order > 3)
    throw std::runtime_error(
        "measure_suprema: orders above 3 exceed the grid-scan capacity");
  const double w = set.w;

  SupremaReport rep;
  rep.gamma_star.assign(static_cast<std::size_t>(max_order), 0.0);
  rep.gamma_prime_star.assign(static_cast<std::size_t>(max_order), 0.0);
  rep.gamma_double_star.assign(static_cast<std::size_t>(max_order), 0.0);

  const std::vector<OrderTerms> buckets = bucket_terms(sys, output);
  const std::vector<int> inband = closed_band_bins(grids.order1, w);
  const std::vector<double> fine_freqs = grid_freqs(grids.order1);

  for (int q = 1; q <= max_order; ++q) {
    const OrderTerms& bucket = buckets[static_cast<std::size_t>(q - 1)];
    if (bucket.count() == 0) continue;
    const int t_count = bucket.count();
    Eigen::Map<const Eigen::VectorXd> coeff(bucket.coeff.data(), t_count);

    // In-band profile Gamma(0, ..., 0, f) on the fine 1-D grid: closed form
    // from the separable structure.
    {
      Eigen::VectorXcd lead = Eigen::VectorXcd::Ones(t_count);
      for (int j = 0; j < q - 1; ++j)
        for (int t = 0; t < t_count; ++t)
          lead[t] *= factor_point(bucket.terms[static_cast<std::size_t>(t)]->factors[static_cast<std::size_t>(j)], 0.0);
      double best = 0.0;
      for (int i : inband) {
        cplx acc(0.0, 0.0);
        for (int t = 0; t < t_count; ++t)
          acc += coeff[t] * lead[t] *
                 factor_point(bucket.terms[static_cast<std::size_t>(t)]->factors[static_cast<std::size_t>(q - 1)],
                              fine_freqs[static_cast<std::size_t>(i)]);
        best = std::max(best, std::abs(acc));
      }
      rep.gamma_double_star[static_cast<std::size_t>(q - 1)] = best;
    }

    if (q == 1) {
      // Full-domain scan and in-band derivative on the fine grid.
      const int g = grids.order1;
      std::vector<cplx> total(static_cast<std::size_t>(g), cplx(0.0, 0.0));
      for (int t = 0; t < t_count; ++t) {
        const std::vector<cplx> fg =
            factor_grid(bucket.terms[static_cast<std::size_t>(t)]->factors[0], g);
        for (int i = 0; i < g; ++i) total[static_cast<std::size_t>(i)] += coeff[t] * fg[static_cast<std::size_t>(i)];
      }
      double best = 0.0;
      for (int i = 0; i < g; ++i) best = std::max(best, std::abs(total[static_cast<std::size_t>(i)]));
      rep.gamma_star[0] = best;

      double best_d = 0.0;
      for (int i : inband) {
        const int up = (i + 1) % g;
        const int dn = (i + g - 1) % g;
        const cplx d = (total[static_cast<std::size_t>(up)] - total[static_cast<std::size_t>(dn)]) /
                       (2.0 / static_cast<double>(g));
        best_d = std::max(best_d, std::abs(d));
      }
      rep.gamma1_prime_double_star = best_d;
      continue;
    }

    // Full-domain grid maximum via per-slice rank-1 accumulation.
    const int g = (q == 2) ? grids.order2 : grids.order3;
    const std::vector<double> axis_freqs = grid_freqs(g);
    std::vector<Eigen::MatrixXcd> fv(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) fv[static_cast<std::size_t>(j)] = bucket_axis_values(bucket, j, axis_freqs);

    double best = 0.0;
    if (q == 2) {
      const Eigen::MatrixXcd plane =
          fv[0].transpose() * coeff.asDiagonal() * fv[1];
      best = plane.cwiseAbs().maxCoeff();
    } else {
      Eigen::VectorXcd slice_coeff(t_count);
      for (int i3 = 0; i3 < g; ++i3) {
        for (int t = 0; t < t_count; ++t) slice_coeff[t] = coeff[t] * fv[2](t, i3);
        const Eigen::MatrixXcd plane =
            fv[0].transpose() * slice_coeff.asDiagonal() * fv[1];
        best = std::max(best, plane.cwiseAbs().maxCoeff());
      }
    }
    rep.gamma_star[static_cast<std::size_t>(q - 1)] = best;
    rep.gamma_prime_star[static_cast<std::size_t>(q - 1)] =
        gradient_difference_sup(bucket, q, w, grids.gradient);
  }

  double v_star = 0.0;
  for (int k = 0; k < static_cast<int>(set.sequences.size()); ++k) {
    const SpectrumGrid v = evaluate_dpswf(set, k, grids.order1);
    for (const cplx& x : v.value) v_star = std::max(v_star, std::abs(x));
  }
  rep.v_m_star = v_star;
  rep.lambda_min = *std::min_element(set.eigenvalues.begin(), set.eigenvalues.end());
  return rep;
}

std::vector<JSweepRow> run_j_sweep(int n, double nw, int m,
                                   const std::vector<int>& q_orders, int draws,
                                   std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("run_j_sweep: draws must be >= 1");
  const DpssSet set = generate_dpss(n, nw, m);
  int grid = 4096;
  while (grid < 16 * n) grid *= 2;
  JWorkspace ws = make_workspace(set, grid, /*with_abs=*/true);

  std::vector<JSweepRow> rows(q_orders.size() * static_cast<std::size_t>(draws));
#pragma omp parallel for schedule(dynamic)
  for (long long flat = 0; flat < static_cast<long long>(rows.size()); ++flat) {
    const int qi = static_cast<int>(flat / draws);
    const int draw = static_cast<int>(flat % draws);
    const int q = q_orders[static_cast<std::size_t>(qi)];
    auto eng = make_engine(derive_seed(seed, {static_cast<std::uint64_t>(q),
                                              static_cast<std::uint64_t>(draw)}));
    const std::vector<int> tuple = draw_tuple(eng, q, m);
    JSweepRow row;
    row.n = n;
    row.q = q;
    row.draw = draw;
    const std::vector<cplx> jg = convolve_tuple(ws, ws.inner_dft, ws.outer_dft, tuple);
    row.max_abs_j = band_max_abs(jg, ws.open_bins);
    const std::vector<cplx> env =
        convolve_tuple(ws, ws.inner_abs_dft, ws.outer_abs_dft, tuple);
    row.j_b = band_max_abs(env, ws.open_bins);
    row.closed_form = jb_closed_form(q, set.w);
    rows[static_cast<std::size_t>(flat)] = row;
  }
  return rows;
}

}  // namespace slepvolt
