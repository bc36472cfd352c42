#include "slepvolt/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slepvolt {

namespace {
constexpr double kPi = 3.14159265358979323846;

int common_length(const std::vector<std::vector<double>>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("evaluate: no input channels");
  const int n = static_cast<int>(inputs[0].size());
  for (const auto& u : inputs)
    if (static_cast<int>(u.size()) != n)
      throw std::invalid_argument("evaluate: input channels differ in length");
  return n;
}

// Contribution of one term over n_out samples.
std::vector<double> term_response(const SeparableTerm& term,
                                  const std::vector<std::vector<double>>& inputs,
                                  int n_out) {
  std::vector<double> acc(static_cast<std::size_t>(n_out), term.coefficient);
  for (std::size_t j = 0; j < term.factors.size(); ++j) {
    const std::vector<double> phi =
        causal_filter(term.factors[j], inputs[static_cast<std::size_t>(term.channels[j])],
                      n_out);
    for (int t = 0; t < n_out; ++t) acc[t] *= phi[t];
  }
  return acc;
}

// Shared core of the parallel and serial evaluators: per-term responses are
// stored separately, then reduced in term order so both paths agree exactly.
std::vector<std::vector<double>> evaluate_impl(
    const SeparableSystem& sys, const std::vector<std::vector<double>>& inputs,
    int n_out, bool parallel) {
  sys.check();
  const int n_in = common_length(inputs);
  if (static_cast<int>(inputs.size()) != sys.num_inputs)
    throw std::invalid_argument("evaluate: channel count mismatch");
  if (n_out < 0) n_out = n_in;

  std::vector<std::vector<double>> out(sys.terms.size());
  for (int m = 0; m < sys.num_outputs(); ++m) {
    const auto& terms = sys.terms[m];
    std::vector<std::vector<double>> parts(terms.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
      for (long i = 0; i < static_cast<long>(terms.size()); ++i)
        parts[i] = term_response(terms[i], inputs, n_out);
    } else {
      for (std::size_t i = 0; i < terms.size(); ++i)
        parts[i] = term_response(terms[i], inputs, n_out);
    }
    std::vector<double> y(static_cast<std::size_t>(n_out), sys.offset(m));
    for (const auto& part : parts)
      for (int t = 0; t < n_out; ++t) y[t] += part[t];
    out[m] = std::move(y);
  }
  return out;
}
}  // namespace

int SeparableTerm::max_lag() const {
  int lag = 0;
  for (const auto& f : factors) lag = std::max(lag, static_cast<int>(f.size()));
  return lag;
}

int SeparableSystem::max_order() const {
  int q = 0;
  for (const auto& out : terms)
    for (const auto& term : out) q = std::max(q, term.order());
  return q;
}

int SeparableSystem::max_lag() const {
  int lag = 0;
  for (const auto& out : terms)
    for (const auto& term : out) lag = std::max(lag, term.max_lag());
  return lag;
}

double SeparableSystem::offset(int output) const {
  if (dc_offset.empty()) return 0.0;
  return dc_offset[static_cast<std::size_t>(output)];
}

void SeparableSystem::check() const {
  if (num_inputs < 1) throw std::runtime_error("system: needs at least one input");
  if (terms.empty()) throw std::runtime_error("system: needs at least one output");
  if (!dc_offset.empty() && dc_offset.size() != terms.size())
    throw std::runtime_error("system: dc offset count does not match outputs");
  for (const auto& out : terms) {
    for (const auto& term : out) {
      if (term.order() < 1) throw std::runtime_error("system: empty term");
      if (term.channels.size() != term.factors.size())
        throw std::runtime_error("system: factor/channel count mismatch");
      for (int c : term.channels)
        if (c < 0 || c >= num_inputs)
          throw std::runtime_error("system: channel index out of range");
      for (const auto& f : term.factors) {
        if (f.empty()) throw std::runtime_error("system: empty factor");
        for (double v : f)
          if (!std::isfinite(v)) throw std::runtime_error("system: non-finite kernel value");
      }
      if (!std::isfinite(term.coefficient))
        throw std::runtime_error("system: non-finite coefficient");
    }
  }
  for (double v : dc_offset)
    if (!std::isfinite(v)) throw std::runtime_error("system: non-finite dc offset");
}

std::vector<double> causal_filter(const std::vector<double>& factor,
                                  const std::vector<double>& u, int n_out) {
  if (n_out < 0) n_out = static_cast<int>(u.size());
  const int n_in = static_cast<int>(u.size());
  const int n_lag = static_cast<int>(factor.size());
  std::vector<double> phi(static_cast<std::size_t>(n_out), 0.0);
  for (int t = 0; t < n_out; ++t) {
    const int lag_max = std::min(t, n_lag);
    double acc = 0.0;
    for (int lag = 1; lag <= lag_max; ++lag) {
      const int s = t - lag;
      if (s < n_in) acc += factor[lag - 1] * u[s];
    }
    phi[t] = acc;
  }
  return phi;
}

std::vector<std::vector<double>> evaluate_time_domain(
    const SeparableSystem& sys, const std::vector<std::vector<double>>& inputs,
    int n_out) {
  return evaluate_impl(sys, inputs, n_out, true);
}

std::vector<std::vector<double>> evaluate_time_domain_serial(
    const SeparableSystem& sys, const std::vector<std::vector<double>>& inputs,
    int n_out) {
  return evaluate_impl(sys, inputs, n_out, false);
}

std::vector<std::vector<std::vector<double>>> evaluate_per_order(
    const SeparableSystem& sys, const std::vector<std::vector<double>>& inputs,
    int n_out) {
  sys.check();
  const int n_in = common_length(inputs);
  if (static_cast<int>(inputs.size()) != sys.num_inputs)
    throw std::invalid_argument("evaluate: channel count mismatch");
  if (n_out < 0) n_out = n_in;
  const int q_max = sys.max_order();

  std::vector<std::vector<std::vector<double>>> out(
      static_cast<std::size_t>(q_max),
      std::vector<std::vector<double>>(
          sys.terms.size(), std::vector<double>(static_cast<std::size_t>(n_out), 0.0)));
  for (int m = 0; m < sys.num_outputs(); ++m) {
    for (const auto& term : sys.terms[m]) {
      const std::vector<double> part = term_response(term, inputs, n_out);
      std::vector<double>& dst = out[static_cast<std::size_t>(term.order() - 1)]
                                    [static_cast<std::size_t>(m)];
      for (int t = 0; t < n_out; ++t) dst[t] += part[t];
    }
  }
  return out;
}

ResponseSpectrum response_spectrum(const SeparableSystem& sys,
                                   const std::vector<std::vector<double>>& inputs,
                                   int grid_size, int output) {
  sys.check();
  for (double v : sys.dc_offset)
    if (v != 0.0)
      throw std::runtime_error(
          "response_spectrum: per-order decomposition requires zero dc offsets");
  const int n_in = common_length(inputs);
  const int n_ext = n_in + sys.max_lag();
  if (grid_size < n_ext)
    throw std::runtime_error(
        "response_spectrum: grid must hold the full response support (need >= " +
        std::to_string(n_ext) + " bins)");
  if (output < 0 || output >= sys.num_outputs())
    throw std::out_of_range("response_spectrum: output index");

  const auto per_order_time = evaluate_per_order(sys, inputs, n_ext);
  ResponseSpectrum rs;
  rs.total = SpectrumGrid::zeros(grid_size);
  rs.per_order.reserve(per_order_time.size());
  for (const auto& order_block : per_order_time) {
    SpectrumGrid g = SpectrumGrid::zeros(grid_size);
    g.value = dft_forward_real(order_block[static_cast<std::size_t>(output)], grid_size);
    for (int i = 0; i < grid_size; ++i) rs.total.value[i] += g.value[i];
    rs.per_order.push_back(std::move(g));
  }
  return rs;
}

SpectrumGrid gfrf_order1(const SeparableSystem& sys, int grid_size, int output,
                         int input) {
  sys.check();
  if (output < 0 || output >= sys.num_outputs())
    throw std::out_of_range("gfrf_order1: output index");
  if (input < 0 || input >= sys.num_inputs)
    throw std::out_of_range("gfrf_order1: input index");
  if (grid_size < sys.max_lag())
    throw std::runtime_error("gfrf_order1: grid shorter than the kernel support");
  SpectrumGrid g = SpectrumGrid::zeros(grid_size);
  for (const auto& term : sys.terms[static_cast<std::size_t>(output)]) {
    if (term.order() != 1 || term.channels[0] != input) continue;
    const std::vector<cplx> spec = dft_forward_real(term.factors[0], grid_size);
    for (int i = 0; i < grid_size; ++i) {
      // Factor index j means lag j+1, so the transform carries e^{-i2pi f}.
      const double phase = -2.0 * kPi * g.freq[i];
      g.value[i] += term.coefficient * spec[i] * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return g;
}

SpectrumGrid gfrf_orderq_diagonal(const SeparableSystem& sys, int q, int grid_size,
                                  int output) {
  sys.check();
  if (q < 1) throw std::invalid_argument("gfrf_orderq_diagonal: order must be >= 1");
  if (output < 0 || output >= sys.num_outputs())
    throw std::out_of_range("gfrf_orderq_diagonal: output index");
  if (grid_size < sys.max_lag())
    throw std::runtime_error("gfrf_orderq_diagonal: grid shorter than kernel support");

  // Arguments f/q land on the q*grid_size refinement of the output grid.
  const int fine = q * grid_size;
  SpectrumGrid g = SpectrumGrid::zeros(grid_size);
  for (const auto& term : sys.terms[static_cast<std::size_t>(output)]) {
    if (term.order() != q) continue;
    std::vector<std::vector<cplx>> factor_spec;
    factor_spec.reserve(term.factors.size());
    for (const auto& f : term.factors) factor_spec.push_back(dft_forward_real(f, fine));
    for (int i = 0; i < grid_size; ++i) {
      const long signed_bin = std::lround(g.freq[i] * grid_size);
      const int arg_bin = static_cast<int>(((signed_bin % fine) + fine) % fine);
      const double f_arg = g.freq[i] / q;
      cplx prod(term.coefficient, 0.0);
      for (const auto& spec : factor_spec) {
        const double phase = -2.0 * kPi * f_arg;
        prod *= spec[arg_bin] * cplx(std::cos(phase), std::sin(phase));
      }
      g.value[i] += prod;
    }
  }
  return g;
}

std::vector<cplx> gfrf_orderq_full(const SeparableSystem& sys, int q, int grid_size,
                                   int output) {
  sys.check();
  if (q < 1) throw std::invalid_argument("gfrf_orderq_full: order must be >= 1");
  if (grid_size > 64)
    throw std::runtime_error(
        "gfrf_orderq_full: grid capped at 64 bins per axis; use the diagonal variant "
        "for finer grids");
  if (output < 0 || output >= sys.num_outputs())
    throw std::out_of_range("gfrf_orderq_full: output index");

  std::size_t total = 1;
  for (int j = 0; j < q; ++j) total *= static_cast<std::size_t>(grid_size);
  std::vector<cplx> tensor(total, cplx(0.0, 0.0));

  for (const auto& term : sys.terms[static_cast<std::size_t>(output)]) {
    if (term.order() != q) continue;
    // Per-factor transforms with the lag-1 phase folded in.
    std::vector<std::vector<cplx>> fs;
    fs.reserve(term.factors.size());
    for (const auto& f : term.factors) {
      std::vector<cplx> spec = dft_forward_real(f, grid_size);
      for (int i = 0; i < grid_size; ++i) {
        const double phase = -2.0 * kPi * bin_frequency(i, grid_size);
        spec[i] *= cplx(std::cos(phase), std::sin(phase));
      }
      fs.push_back(std::move(spec));
    }
    std::vector<int> idx(static_cast<std::size_t>(q), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
      cplx prod(term.coefficient, 0.0);
      for (int j = 0; j < q; ++j) prod *= fs[static_cast<std::size_t>(j)]
                                             [static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      tensor[flat] += prod;
      // Row-major odometer: last index varies fastest.
      for (int j = q - 1; j >= 0; --j) {
        if (++idx[static_cast<std::size_t>(j)] < grid_size) break;
        idx[static_cast<std::size_t>(j)] = 0;
      }
    }
  }
  return tensor;
}

}  // namespace slepvolt
