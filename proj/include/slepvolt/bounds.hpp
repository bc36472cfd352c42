#pragma once

// Higher-order suppression bounds for band-concentrated inputs:
//  * the band-limited DPSWF product integral J and its envelope J_B,
//  * kernel-transform suprema measured on evaluation grids,
//  * the assembled per-order output bounds (A, B, C),
//  * the quadratic-truncation constant epsilon and the inner-product
//    deviation bound built from it.

#include <cstdint>
#include <optional>
#include <vector>

#include "slepvolt/grid.hpp"
#include "slepvolt/slepian.hpp"
#include "slepvolt/volterra.hpp"

namespace slepvolt {

// (Q-1)-dimensional integral of V_{m_Q}(f - sum f_j) * prod_j V_{m_j}(f_j)
// over the in-band box (-W, W)^{Q-1}, computed as iterated weighted circular
// convolutions on a grid_size grid; the outer wave function is evaluated
// exactly at the (possibly off-grid) frequency f. m_q holds Q sequence orders.
cplx compute_j(const DpssSet& set, int q, double f, const std::vector<int>& m_q,
               int grid_size);

// Same integral on every grid frequency at once (DFT bin order).
std::vector<cplx> compute_j_grid(const DpssSet& set, int q,
                                 const std::vector<int>& m_q, int grid_size);

// Envelope integral for one order tuple: the same convolution on |V| factors,
// maximized over in-band frequencies (open interval).
double compute_jb_tuple(const DpssSet& set, const std::vector<int>& m_q,
                        int grid_size);

struct JBoundResult {
  double value = 0.0;
  bool sampled = false;  // tuple supremum sampled rather than exhaustive
};

// Supremum of the envelope integral over order tuples in {0..M-1}^Q and
// in-band f. Exhaustive when M^Q <= 10^4, otherwise 25 seeded random tuples
// (flagged `sampled`).
JBoundResult compute_jb(const DpssSet& set, int q, int m, int grid_size,
                        std::uint64_t seed = 1);

// (2W)^{(Q-2)/2}: the closed-form envelope level.
double jb_closed_form(int q, double w);

// --- scalar bound assembly -------------------------------------------------

// (1 - lambda_min)^{(Q-1)/2} * V_{M,*} * M^Q * Gamma*_Q
double bound_a(int q, int m, double lambda_min, double v_m_star, double gamma_star);

// W^{Q-1} * Gamma'*_Q * M^Q * J_B
double bound_b(int q, int m, double w, double gamma_prime_star, double j_b);

// Kernel-transform suprema, measured as grid maxima (see measure_suprema).
struct SupremaReport {
  std::vector<double> gamma_star;         // sup |Gamma^(q)|, index q-1
  std::vector<double> gamma_prime_star;   // gradient-difference sup, index q-1 (0 for q=1)
  std::vector<double> gamma_double_star;  // in-band max of |Gamma^(q)(0,..,0,f)|, index q-1
  double gamma1_prime_double_star = 0.0;  // in-band max of |d Gamma^(1)/df|
  double v_m_star = 0.0;                  // max_k max_f |V_k(f)| over the input set
  double lambda_min = 0.0;

  int max_order() const { return static_cast<int>(gamma_star.size()); }
  // Entry for order q, zero when the report does not extend that far.
  static double order_entry(const std::vector<double>& v, int q);
};

struct BoundReport {
  int order = 0;
  double frequency = 0.0;  // report stamp; the in-band term uses the in-band max
  double bound_a = 0.0;
  double bound_b = 0.0;
  double bound_c = 0.0;
  double j_b = 0.0;
  double j_b_closed_form = 0.0;
  double delta_prime = 0.0;       // max(0, j_b - closed form)
  double suppression_scale = 0.0; // W^{(Q-2)/2}, the advertised decay scale
  std::optional<double> epsilon;
};

// bound_C = A + B + (closed_form + delta') * M^Q * Gamma**_Q. When no measured
// j_b is supplied the closed form is used (delta' = 0).
BoundReport bound_c(int q, int m, double w, const SupremaReport& suprema, double f,
                    std::optional<double> j_b_measured = std::nullopt,
                    std::optional<double> epsilon = std::nullopt);

// e^x - 1 - x - x^2/2, evaluated by its power series for small x.
double series_tail(double x);

// Quadratic-truncation constant for an exponentially dominated system:
//   V_{M,*} tail(alpha M sqrt(1-lambda_min))
//   + W^{-2} 2^{-1/2} tail(sqrt(2) gamma M W^{3/2})
//   + (2W)^{-1} tail(sqrt(2W) beta M).
double truncation_epsilon(double alpha, double beta, double gamma, int m, double w,
                        double lambda_min, double v_m_star);

// Deviation bound for the inner-product statistic against the order-1
// response at dc:
//   eps sqrt(lambda_min) + W M Gamma1'** + M Gamma1* (1 - lambda_min)
//   + (sqrt(2W) + sqrt(1 - lambda_{m'})) M^2 Gamma2*.
double inner_product_bound(int m, double w, const std::vector<double>& lambda_values,
                           const SupremaReport& suprema, double epsilon, int m_prime);

// --- suprema measurement ----------------------------------------------------

struct SupremaGrids {
  int order1 = 4096;  // 1-D full-domain and in-band scans
  int order2 = 256;   // 2-D full-domain scan, per axis
  int order3 = 128;   // 3-D full-domain scan, per axis
  int gradient = 33;  // per-axis nodes for gradient boxes
};

// Grid maxima of the kernel transforms of a separable system (output channel
// `output`), plus the input-set constants V_{M,*} and lambda_min. Gradients
// use centered differences on a one-step halo around the stated boxes, so the
// reported values are conservative for smooth kernels.
SupremaReport measure_suprema(const SeparableSystem& sys, const DpssSet& set,
                              const SupremaGrids& grids = {}, int output = 0);

// --- envelope sweep over random order tuples --------------------------------

struct JSweepRow {
  int n = 0;
  int q = 0;
  int draw = 0;
  double max_abs_j = 0.0;
  double j_b = 0.0;        // envelope integral for this draw's tuple
  double closed_form = 0.0;
};

// For each order q: `draws` random tuples from {0..M-1}^q (with replacement),
// each scored by its in-band |J| maximum and its envelope integral.
std::vector<JSweepRow> run_j_sweep(int n, double nw, int m,
                                   const std::vector<int>& q_orders, int draws,
                                   std::uint64_t seed);

}  // namespace slepvolt
