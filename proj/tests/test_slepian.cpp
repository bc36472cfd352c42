// Slepian sequence generation, eigenvalue quadrature, wave-function
// evaluation, and carrier modulation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "oracles/oracle_dense_dpss.hpp"
#include "slepvolt/geometry.hpp"
#include "slepvolt/grid.hpp"
#include "slepvolt/slepian.hpp"

using namespace slepvolt;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Max deviation between two unit vectors after aligning the sign.
double sign_aligned_dev(const std::vector<double>& a, const std::vector<double>& b) {
  const double sign = dot(a, b) >= 0.0 ? 1.0 : -1.0;
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    dev = std::max(dev, std::abs(a[i] - sign * b[i]));
  return dev;
}

}  // namespace

TEST_CASE("set invariants: unit energy, orthogonality, eigenvalue order, symmetry") {
  for (const auto& [n, nw, k] : std::vector<std::tuple<int, double, int>>{
           {16, 2.0, 4}, {64, 4.0, 8}, {240, 4.0, 8}, {200, 5.0, 6}}) {
    const DpssSet set = generate_dpss(n, nw, k);
    REQUIRE(static_cast<int>(set.sequences.size()) == k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b <= a; ++b) {
        const double expected = (a == b) ? 1.0 : 0.0;
        CHECK(std::abs(dot(set.sequences[a], set.sequences[b]) - expected) <= 1e-10);
      }
      CHECK(set.eigenvalues[a] > 0.0);
      CHECK(set.eigenvalues[a] < 1.0);
      if (a > 0) CHECK(set.eigenvalues[a] < set.eigenvalues[a - 1]);
      // Even orders are symmetric, odd orders antisymmetric about the middle.
      const double parity = (a % 2 == 0) ? 1.0 : -1.0;
      double sym_dev = 0.0;
      for (int t = 0; t < n; ++t)
        sym_dev = std::max(sym_dev,
                           std::abs(set.sequences[a][t] - parity * set.sequences[a][n - 1 - t]));
      CHECK(sym_dev <= 1e-9);
    }
  }
}

TEST_CASE("tridiagonal path matches the dense concentration-matrix eigensolve") {
  for (int n : {8, 16, 24, 32}) {
    const double nw = 2.0;
    const int k = 4;
    const DpssSet set = generate_dpss(n, nw, k);
    const auto ref = oracle::dense_dpss(n, nw, k);
    for (int a = 0; a < k; ++a) {
      CHECK(sign_aligned_dev(set.sequences[a], ref.sequences[a]) <= 1e-8);
      CHECK(std::abs(set.eigenvalues[a] - ref.eigenvalues[a]) <= 1e-8);
    }
  }
  const DpssSet small = generate_dpss(16, 2.0, 4);
  CHECK(small.eigenvalues[0] > 0.99);
}

TEST_CASE("most concentrated eigenvalue window for the long benchmark set") {
  const DpssSet set = generate_dpss(200, 5.0, 6);
  const double gap = 1.0 - set.eigenvalues[5];
  CHECK(gap >= 3.5e-5);
  CHECK(gap <= 1.4e-4);
}

TEST_CASE("parameter and resolution errors") {
  CHECK_THROWS(generate_dpss(8, 2.0, 9));    // more sequences than samples
  CHECK_THROWS(generate_dpss(4, 2.5, 2));    // w = 0.625 outside (0, 1/2)
  CHECK_THROWS(generate_dpss(16, 0.0, 2));   // w = 0
  const DpssSet set = generate_dpss(64, 2.0, 3);
  CHECK_THROWS(eigenvalues_via_quadrature(set, 64));  // grid below 2n
  // Band (-1/128, 1/128) sees only 3 bins of a 128-point grid.
  const DpssSet narrow = generate_dpss(64, 0.5, 1);
  CHECK_THROWS(eigenvalues_via_quadrature(narrow, 128));
}

TEST_CASE("band quadrature reproduces the eigenvalues") {
  const DpssSet set = generate_dpss(200, 5.0, 6);
  const auto quad = eigenvalues_via_quadrature(set, 64 * 200);
  for (int k = 0; k < 6; ++k)
    CHECK(std::abs(quad[k] - set.eigenvalues[k]) <= 1e-6);
}

TEST_CASE("full-band energy integral is one") {
  const DpssSet set = generate_dpss(64, 4.0, 6);
  const int g = 8 * 64;
  for (int k = 0; k < 6; ++k) {
    const SpectrumGrid v = evaluate_dpswf(set, k, g);
    double total = 0.0;
    for (const cplx& x : v.value) total += std::norm(x) / g;
    CHECK(std::abs(total - 1.0) <= 1e-8);
  }
}

TEST_CASE("in-band cross products obey the leakage and energy bounds") {
  const DpssSet set = generate_dpss(64, 4.0, 6);
  const int g = 64 * 64;
  const std::vector<double> wts = band_weights(g, set.w);
  std::vector<SpectrumGrid> v;
  for (int k = 0; k < 6; ++k) v.push_back(evaluate_dpswf(set, k, g));
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < a; ++b) {
      cplx acc(0.0, 0.0);
      for (int i = 0; i < g; ++i)
        if (wts[static_cast<std::size_t>(i)] > 0.0)
          acc += wts[static_cast<std::size_t>(i)] * v[a].value[static_cast<std::size_t>(i)] *
                 std::conj(v[b].value[static_cast<std::size_t>(i)]);
      const double mag = std::abs(acc);
      const double la = set.eigenvalues[a], lb = set.eigenvalues[b];
      CHECK(mag <= std::sqrt((1.0 - la) * (1.0 - lb)) + 1e-6);
      CHECK(mag <= std::sqrt(la * lb) + 1e-6);
    }
  }
}

TEST_CASE("wave-function evaluation: zeros, Cauchy-Schwarz cap, peak at dc") {
  const DpssSet set = generate_dpss(200, 5.0, 6);
  const int g = 8 * 200;
  for (int k = 0; k < 6; ++k) {
    const SpectrumGrid v = evaluate_dpswf(set, k, g);
    if (k % 2 == 1) CHECK(std::abs(v.value[0]) <= 1e-10);  // antisymmetric sum
    double peak = 0.0;
    for (const cplx& x : v.value) peak = std::max(peak, std::abs(x));
    CHECK(peak <= std::sqrt(200.0) + 1e-12);
    if (k == 0) CHECK(std::abs(v.value[0]) == doctest::Approx(peak).epsilon(1e-12));
  }
}

TEST_CASE("point evaluation agrees with the padded transform on grid bins") {
  const DpssSet set = generate_dpss(48, 3.0, 4);
  const int g = 512;
  const SpectrumGrid v = evaluate_dpswf(set, 2, g);
  for (int i : {0, 1, 7, 100, 255, 256, 400, 511}) {
    const cplx direct = dpswf_point(set.sequences[2], v.freq[static_cast<std::size_t>(i)]);
    CHECK(std::abs(direct - v.value[static_cast<std::size_t>(i)]) <= 1e-10 * 48);
  }
}

TEST_CASE("modulation: zero carrier identity, concentration, aliasing flag") {
  const Geometry geo;  // n=240, dt=1/30
  const DpssSet set = generate_dpss(geo.n, 4.0, 4);

  const ModulatedSequence flat = modulate(set, 1, 0.0);
  CHECK(flat.carrier == 0.0);
  CHECK_FALSE(flat.aliasing_warning);
  for (int t = 0; t < geo.n; ++t) CHECK(flat.samples[t] == set.sequences[1][t]);

  // Experiment setting: carrier 2 Hz = 2/30 cycles/sample, w = 4/240 = 1/60.
  const double f0 = geo.hz_to_cps(geo.f0_hz);
  CHECK(f0 == doctest::Approx(2.0 / 30.0).epsilon(1e-15));
  CHECK(f0 > 2.0 * set.w);  // bands at +-f0 do not overlap
  for (int k = 0; k < 3; ++k) {
    const ModulatedSequence mod = modulate(set, k, f0);
    CHECK_FALSE(mod.aliasing_warning);
    const int g = 8192;
    const std::vector<cplx> spec = dft_forward_real(mod.samples, g);
    double inband = 0.0, total = 0.0;
    for (int i = 0; i < g; ++i) {
      const double f = bin_frequency(i, g);
      const double e = std::norm(spec[static_cast<std::size_t>(i)]) / g;
      total += e;
      if (std::abs(std::abs(f) - f0) <= set.w + 1e-12) inband += e;
    }
    CHECK(inband / total >= set.eigenvalues[k] - 0.01);
  }

  const DpssSet short_set = generate_dpss(64, 4.0, 2);
  const ModulatedSequence alias = modulate(short_set, 0, 0.45);
  CHECK(alias.aliasing_warning);  // 0.45 + 1/16 passes 1/2
}
