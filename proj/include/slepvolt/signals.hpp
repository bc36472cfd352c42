#pragma once

// Input generators for the detection experiment: seeded Gaussian white noise,
// maximal-length (LFSR) sequences, sums of in-band cosines, and modulated
// DPSS probes — every generator rescales to an exact target energy — plus the
// additive output-noise process.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slepvolt/geometry.hpp"
#include "slepvolt/slepian.hpp"

namespace slepvolt {

enum class InputClass { gaussian_white, m_sequence, ssr, modulated_dpss };

InputClass input_class_from_string(const std::string& name);
std::string to_string(InputClass c);

struct InputSpec {
  InputClass input_class = InputClass::gaussian_white;
  Geometry geometry;                  // n, sample period, carrier, tone spacing
  double target_energy = 1.0;         // sum of squares after rescale
  double half_bandwidth_hz = 0.5;     // W in Hz
  std::optional<int> dpss_order;      // modulated_dpss only
  std::uint64_t seed = 0;

  void check() const;
};

double signal_energy(const std::vector<double>& u);

// Rescale so the sum of squares equals target exactly (to rounding).
// Throws on a zero signal or nonpositive target.
std::vector<double> scale_to_energy(std::vector<double> u, double target);

std::vector<double> gaussian_white(const InputSpec& spec);

// One +-1 period (255 samples) of the degree-8 maximal-length sequence,
// cyclically rotated by `rotation` samples.
std::vector<double> m_sequence_period(int rotation);
std::vector<double> m_sequence(const InputSpec& spec);

// Equal-amplitude zero-phase cosines at center - W, center - W + f_R, ...
// while <= center + W (+1e-12 slack).
std::vector<double> ssr(const InputSpec& spec);

// v^(order) * cos(2 pi f0 t), rescaled. With enforce_odd (the experiment
// protocol), requesting an even order is an error.
std::vector<double> modulated_dpss(const InputSpec& spec, const DpssSet& set,
                                   bool enforce_odd = true);

// Dispatcher used by the CLI; builds the probe basis itself when needed.
std::vector<double> generate_input(const InputSpec& spec);

// signal + seeded Gaussian noise of the given variance (0 = identity).
std::vector<double> add_output_noise(const std::vector<double>& signal,
                                     std::uint64_t seed, double variance = 1.0);

// Odd orders up to 2NW - 1: the probe orders admitted by the protocol.
std::vector<int> odd_probe_orders(double nw);

// DPSS family for an analysis half-bandwidth in Hz: NW = W_hz * duration,
// 2NW sequences.
DpssSet probe_basis(const Geometry& geo, double w_hz);

}  // namespace slepvolt
