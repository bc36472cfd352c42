// Self-checks for the frozen reference implementations in tests/oracles/.
// These validate the references against closed forms and cross-reference
// identities only; no production code is involved. The references are frozen
// after this file passes, so the module tests compare production code against
// an independently validated standard.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "oracles/oracle_dense_dpss.hpp"
#include "oracles/oracle_laguerre_hp.hpp"
#include "oracles/oracle_naive_volterra.hpp"
#include "oracles/oracle_series_tail.hpp"
#include "oracles/oracle_tensor_j.hpp"

TEST_CASE("dense concentration-matrix eigensolve: N=16, NW=2, K=4") {
  const auto r = oracle::dense_dpss(16, 2.0, 4);

  // Eigenvalues strictly decreasing, inside (0,1), top one close to 1.
  for (int k = 0; k < 4; ++k) {
    CHECK(r.eigenvalues[k] > 0.0);
    CHECK(r.eigenvalues[k] < 1.0);
    if (k > 0) CHECK(r.eigenvalues[k] < r.eigenvalues[k - 1]);
  }
  CHECK(r.eigenvalues[0] > 0.99);

  // Orthonormal sequences.
  for (int k = 0; k < 4; ++k) {
    for (int kp = 0; kp <= k; ++kp) {
      double dot = 0.0;
      for (int t = 0; t < 16; ++t) dot += r.sequences[k][t] * r.sequences[kp][t];
      CHECK(std::abs(dot - (k == kp ? 1.0 : 0.0)) < 1e-10);
    }
  }

  // Even/odd symmetry v_t = (-1)^k v_{N-1-t} and leading-element sign.
  for (int k = 0; k < 4; ++k) {
    const double parity = (k % 2 == 0) ? 1.0 : -1.0;
    for (int t = 0; t < 16; ++t)
      CHECK(std::abs(r.sequences[k][t] - parity * r.sequences[k][15 - t]) < 1e-9);
    int t0 = 0;
    while (std::abs(r.sequences[k][t0]) <= 1e-12) ++t0;
    CHECK(r.sequences[k][t0] > 0.0);
  }

  // Rayleigh-quotient identity: lambda_k equals the quadratic form of the
  // concentration matrix, i.e. the in-band energy fraction.
  const double pi = 3.14159265358979323846;
  const double w = 2.0 / 16.0;
  for (int k = 0; k < 4; ++k) {
    double quad = 0.0;
    for (int t = 0; t < 16; ++t) {
      for (int tp = 0; tp < 16; ++tp) {
        const int d = t - tp;
        const double kern = (d == 0) ? 2.0 * w : std::sin(2.0 * pi * w * d) / (pi * d);
        quad += r.sequences[k][t] * kern * r.sequences[k][tp];
      }
    }
    CHECK(std::abs(quad - r.eigenvalues[k]) < 1e-12);
  }
}

TEST_CASE("naive Volterra evaluation: hand-computable cases") {
  // Order 1, single tap at lag 1, unit gain: pure one-sample delay.
  oracle::NaiveSystem sys;
  sys.num_inputs = 1;
  sys.num_outputs = 1;
  sys.max_order = 1;
  sys.terms = {{{oracle::NaiveTerm{1.0, {0}, {{1.0}}}}}};
  std::vector<std::vector<double>> u = {{3.0, -1.0, 2.0, 0.5}};
  auto y = oracle::naive_evaluate(sys, u);
  CHECK(y[0][0] == doctest::Approx(0.0));
  CHECK(y[0][1] == doctest::Approx(3.0));
  CHECK(y[0][2] == doctest::Approx(-1.0));
  CHECK(y[0][3] == doctest::Approx(2.0));

  // Order 2, both factors a single tap at lag 1: y[t] = u[t-1]^2.
  oracle::NaiveSystem sys2;
  sys2.num_inputs = 1;
  sys2.num_outputs = 1;
  sys2.max_order = 2;
  sys2.terms = {{{}, {oracle::NaiveTerm{2.0, {0, 0}, {{1.0}, {1.0}}}}}};
  auto y2 = oracle::naive_evaluate(sys2, u);
  CHECK(y2[0][0] == doctest::Approx(0.0));
  CHECK(y2[0][1] == doctest::Approx(2.0 * 9.0));
  CHECK(y2[0][2] == doctest::Approx(2.0 * 1.0));

  // Two channels, order-2 cross term: y[t] = u0[t-1] * u1[t-2].
  oracle::NaiveSystem sysx;
  sysx.num_inputs = 2;
  sysx.num_outputs = 1;
  sysx.max_order = 2;
  sysx.terms = {{{}, {oracle::NaiveTerm{1.0, {0, 1}, {{1.0}, {0.0, 1.0}}}}}};
  std::vector<std::vector<double>> u2 = {{1.0, 2.0, 3.0, 4.0}, {5.0, 6.0, 7.0, 8.0}};
  auto yx = oracle::naive_evaluate(sysx, u2);
  CHECK(yx[0][0] == doctest::Approx(0.0));
  CHECK(yx[0][1] == doctest::Approx(0.0));
  CHECK(yx[0][2] == doctest::Approx(2.0 * 5.0));
  CHECK(yx[0][3] == doctest::Approx(3.0 * 6.0));

  // DC offset plumbing.
  oracle::NaiveSystem sysdc = sys;
  sysdc.dc_offset = {0.25};
  auto ydc = oracle::naive_evaluate(sysdc, u);
  CHECK(ydc[0][0] == doctest::Approx(0.25));
  CHECK(ydc[0][1] == doctest::Approx(3.25));
}

TEST_CASE("tensor quadrature J: band integral of |V_k|^2 recovers lambda_k") {
  // J(W, 2, 0, {k, k}) = int_{-W}^{W} V_k(f) V_k(-f) df = lambda_k for real
  // sequences, tying the J reference to the dense eigensolve reference.
  const int n = 24;
  const double nw = 3.0;
  const auto d = oracle::dense_dpss(n, nw, 3);
  const double w = nw / n;
  const int grid = 64 * n;  // fine grid so trapezoid error is ~1e-7
  for (int k = 0; k < 3; ++k) {
    const auto j0 = oracle::tensor_j(d.sequences, 2, 0.0, {k, k}, w, grid);
    CHECK(std::abs(j0.imag()) < 1e-12);
    CHECK(std::abs(j0.real() - d.eigenvalues[k]) < 1e-6);
  }
}

TEST_CASE("tensor quadrature J: grid-refinement consistency for Q=3") {
  const int n = 16;
  const double nw = 2.0;
  const auto d = oracle::dense_dpss(n, nw, 4);
  const double w = nw / n;
  const std::vector<int> mq = {0, 2, 1};
  const auto a = oracle::tensor_j(d.sequences, 3, 0.01, mq, w, 8 * n);
  const auto b = oracle::tensor_j(d.sequences, 3, 0.01, mq, w, 32 * n);
  const auto ref = oracle::tensor_j(d.sequences, 3, 0.01, mq, w, 128 * n);
  // Trapezoid error shrinks under refinement and the fine grids agree.
  CHECK(std::abs(b - ref) < std::abs(a - ref));
  CHECK(std::abs(a - ref) < 1e-4 * std::max(1.0, std::abs(ref)));
  CHECK(std::abs(b - ref) < 1e-5 * std::max(1.0, std::abs(ref)));
  // Conjugate symmetry for real sequences: J(-f) = conj(J(f)) when the
  // integration domain is symmetric.
  const auto c = oracle::tensor_j(d.sequences, 3, -0.01, mq, w, 32 * n);
  CHECK(std::abs(c - std::conj(b)) < 1e-9);
}

TEST_CASE("high-precision Laguerre sum: closed forms") {
  CHECK(oracle::laguerre_direct_sum_hp(0, 3.7) == doctest::Approx(1.0));
  CHECK(oracle::laguerre_direct_sum_hp(1, 0.4) == doctest::Approx(0.6));
  // L_2(x) = 1 - 2x + x^2/2
  CHECK(oracle::laguerre_direct_sum_hp(2, 0.7) ==
        doctest::Approx(1.0 - 1.4 + 0.49 / 2.0).epsilon(1e-14));
  // L_3(x) = 1 - 3x + 3x^2/2 - x^3/6
  const double x = 1.3;
  CHECK(oracle::laguerre_direct_sum_hp(3, x) ==
        doctest::Approx(1.0 - 3.0 * x + 1.5 * x * x - x * x * x / 6.0).epsilon(1e-14));
  CHECK(oracle::laguerre_direct_sum_hp(101, 0.0) == doctest::Approx(1.0));
  CHECK(std::isfinite(oracle::laguerre_direct_sum_hp(101, 1.0)));
  CHECK(std::isfinite(oracle::laguerre_direct_sum_hp(4901, 8.0)));
}

TEST_CASE("series tail: identity with the exponential function") {
  // tail(x) = e^x - 1 - x - x^2/2 for moderate x.
  for (double x : {0.05, 0.3, 1.0, 2.5}) {
    const double direct = oracle::series_tail_direct(x);
    const double closed = std::exp(x) - 1.0 - x - 0.5 * x * x;
    CHECK(direct == doctest::Approx(closed).epsilon(1e-12));
  }
  CHECK(oracle::series_tail_direct(0.0) == 0.0);
  CHECK(oracle::quadratic_truncation_eps_direct(0.0, 0.0, 0.0, 2.0, 0.025, 0.9999, 1.0) ==
        0.0);
  // Positive for positive rates.
  CHECK(oracle::quadratic_truncation_eps_direct(0.1, 0.1, 0.1, 2.0, 0.025, 0.9999, 1.0) >
        0.0);
}
