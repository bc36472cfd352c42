#include "slepvolt/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace slepvolt {

double wrap_frequency(double f) {
  double w = f - std::floor(f + 0.5);
  // floor(f + 0.5) sends +1/2 to 0; force the upper edge onto -1/2.
  if (w >= 0.5) w -= 1.0;
  return w;
}

double bin_frequency(int i, int grid_size) {
  return wrap_frequency(static_cast<double>(i) / grid_size);
}

int frequency_to_bin(double f, int grid_size) {
  const long idx = std::lround(wrap_frequency(f) * grid_size);
  return static_cast<int>(((idx % grid_size) + grid_size) % grid_size);
}

SpectrumGrid SpectrumGrid::zeros(int grid_size) {
  if (grid_size < 1) throw std::invalid_argument("SpectrumGrid: size must be positive");
  SpectrumGrid g;
  g.size = grid_size;
  g.freq.resize(grid_size);
  g.value.assign(grid_size, cplx(0.0, 0.0));
  for (int i = 0; i < grid_size; ++i) g.freq[i] = bin_frequency(i, grid_size);
  return g;
}

void SpectrumGrid::check() const {
  if (size < 1 || static_cast<int>(freq.size()) != size ||
      static_cast<int>(value.size()) != size)
    throw std::runtime_error("SpectrumGrid: inconsistent sizes");
  for (int i = 0; i < size; ++i) {
    if (std::abs(freq[i] - bin_frequency(i, size)) > 1e-12)
      throw std::runtime_error("SpectrumGrid: bin " + std::to_string(i) +
                               " is not on the uniform wrapped grid");
  }
}

std::vector<double> band_weights(int grid_size, double w) {
  if (grid_size < 1) throw std::invalid_argument("band_weights: empty grid");
  if (!(w > 0.0) || w > 0.5)
    throw std::invalid_argument("band_weights: half-bandwidth must be in (0, 1/2]");
  std::vector<double> weights(grid_size, 0.0);
  const double h = 1.0 / grid_size;
  const double edge = w * grid_size;  // band edge in bin units
  for (int i = 0; i < grid_size; ++i) {
    const double a = std::abs(bin_frequency(i, grid_size)) * grid_size;
    if (a < edge - 1e-9)
      weights[i] = h;
    else if (std::abs(a - edge) <= 1e-9)
      weights[i] = 0.5 * h;
  }
  return weights;
}

int band_bin_count(const std::vector<double>& weights) {
  int n = 0;
  for (double w : weights)
    if (w > 0.0) ++n;
  return n;
}

namespace {
// FFTW plan creation is not thread-safe; execution through the plan created
// here is, because each call owns its buffers.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<cplx> run_dft(const std::vector<cplx>& x, int sign) {
  const int n = static_cast<int>(x.size());
  if (n == 0) throw std::invalid_argument("dft: empty input");
  std::vector<cplx> out(x.size());
  // FFTW_ESTIMATE does not touch the arrays, so planning on live data is fine.
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(
        n,
        reinterpret_cast<fftw_complex*>(const_cast<cplx*>(x.data())),
        reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("dft: FFTW planning failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}
}  // namespace

std::vector<cplx> dft_forward(const std::vector<cplx>& x) {
  return run_dft(x, FFTW_FORWARD);
}

std::vector<cplx> dft_inverse(const std::vector<cplx>& x) {
  std::vector<cplx> out = run_dft(x, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (cplx& v : out) v *= scale;
  return out;
}

std::vector<cplx> dft_forward_real(const std::vector<double>& x, int grid_size) {
  if (static_cast<int>(x.size()) > grid_size)
    throw std::invalid_argument("dft_forward_real: sequence longer than grid");
  std::vector<cplx> padded(static_cast<std::size_t>(grid_size), cplx(0.0, 0.0));
  for (std::size_t t = 0; t < x.size(); ++t) padded[t] = cplx(x[t], 0.0);
  return dft_forward(padded);
}

}  // namespace slepvolt
