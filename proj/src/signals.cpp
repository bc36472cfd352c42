#include "slepvolt/signals.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "slepvolt/rng.hpp"

namespace slepvolt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kLfsrPeriod = 255;

}  // namespace

InputClass input_class_from_string(const std::string& name) {
  if (name == "gaussian_white") return InputClass::gaussian_white;
  if (name == "m_sequence") return InputClass::m_sequence;
  if (name == "ssr") return InputClass::ssr;
  if (name == "modulated_dpss") return InputClass::modulated_dpss;
  throw std::invalid_argument("unknown input class '" + name + "'");
}

std::string to_string(InputClass c) {
  switch (c) {
    case InputClass::gaussian_white: return "gaussian_white";
    case InputClass::m_sequence: return "m_sequence";
    case InputClass::ssr: return "ssr";
    case InputClass::modulated_dpss: return "modulated_dpss";
  }
  throw std::logic_error("unreachable input class");
}

void InputSpec::check() const {
  geometry.check();
  if (!(target_energy > 0.0))
    throw std::invalid_argument("input spec: target energy must be positive");
  if (!(half_bandwidth_hz > 0.0))
    throw std::invalid_argument("input spec: half bandwidth must be positive");
  if (geometry.f0_hz + half_bandwidth_hz >= geometry.nyquist_hz())
    throw std::invalid_argument("input spec: band extends to or past Nyquist");
}

double signal_energy(const std::vector<double>& u) {
  double e = 0.0;
  for (double v : u) e += v * v;
  return e;
}

std::vector<double> scale_to_energy(std::vector<double> u, double target) {
  if (!(target > 0.0))
    throw std::invalid_argument("scale_to_energy: target must be positive");
  const double e = signal_energy(u);
  if (e <= 0.0)
    throw std::runtime_error("scale_to_energy: cannot rescale a zero signal");
  const double s = std::sqrt(target / e);
  for (double& v : u) v *= s;
  return u;
}

std::vector<double> gaussian_white(const InputSpec& spec) {
  spec.check();
  GaussianDraws draws(spec.seed);
  return scale_to_energy(draws.take(spec.geometry.n), spec.target_energy);
}

std::vector<double> m_sequence_period(int rotation) {
  // Degree-8 LFSR, feedback taps 8, 6, 5, 4 (a primitive polynomial), all-ones
  // start state; output is the last register stage.
  std::array<int, 8> reg;
  reg.fill(1);
  std::vector<int> bits(kLfsrPeriod);
  for (int i = 0; i < kLfsrPeriod; ++i) {
    bits[static_cast<std::size_t>(i)] = reg[7];
    const int fb = reg[7] ^ reg[5] ^ reg[4] ^ reg[3];
    for (int j = 7; j > 0; --j) reg[static_cast<std::size_t>(j)] = reg[static_cast<std::size_t>(j - 1)];
    reg[0] = fb;
  }
  const int rot = ((rotation % kLfsrPeriod) + kLfsrPeriod) % kLfsrPeriod;
  std::vector<double> out(kLfsrPeriod);
  for (int i = 0; i < kLfsrPeriod; ++i)
    out[static_cast<std::size_t>(i)] = bits[static_cast<std::size_t>((i + rot) % kLfsrPeriod)] ? 1.0 : -1.0;
  return out;
}

std::vector<double> m_sequence(const InputSpec& spec) {
  spec.check();
  const std::vector<double> period = m_sequence_period(static_cast<int>(spec.seed % kLfsrPeriod));
  std::vector<double> u(static_cast<std::size_t>(spec.geometry.n));
  for (int t = 0; t < spec.geometry.n; ++t)
    u[static_cast<std::size_t>(t)] = period[static_cast<std::size_t>(t % kLfsrPeriod)];
  return scale_to_energy(std::move(u), spec.target_energy);
}

std::vector<double> ssr(const InputSpec& spec) {
  spec.check();
  const Geometry& geo = spec.geometry;
  std::vector<double> freqs_hz;
  for (double f = geo.f0_hz - spec.half_bandwidth_hz;
       f <= geo.f0_hz + spec.half_bandwidth_hz + 1e-12; f += geo.fr_hz)
    freqs_hz.push_back(f);
  if (freqs_hz.empty())
    throw std::invalid_argument("ssr: no tone fits the requested band");
  std::vector<double> u(static_cast<std::size_t>(geo.n), 0.0);
  for (double f_hz : freqs_hz) {
    const double f = geo.hz_to_cps(f_hz);
    for (int t = 0; t < geo.n; ++t) u[static_cast<std::size_t>(t)] += std::cos(2.0 * kPi * f * t);
  }
  return scale_to_energy(std::move(u), spec.target_energy);
}

std::vector<double> modulated_dpss(const InputSpec& spec, const DpssSet& set,
                                   bool enforce_odd) {
  spec.check();
  if (!spec.dpss_order.has_value())
    throw std::invalid_argument("modulated_dpss: spec carries no dpss order");
  const int order = *spec.dpss_order;
  if (order < 0 || order >= static_cast<int>(set.sequences.size()))
    throw std::invalid_argument("modulated_dpss: order outside the sequence set");
  if (enforce_odd && order % 2 == 0)
    throw std::runtime_error(
        "modulated_dpss: even order violates the odd-order input protocol");
  if (set.n != spec.geometry.n)
    throw std::invalid_argument("modulated_dpss: sequence length does not match geometry");
  const ModulatedSequence mod = modulate(set, order, spec.geometry.hz_to_cps(spec.geometry.f0_hz));
  return scale_to_energy(mod.samples, spec.target_energy);
}

std::vector<double> generate_input(const InputSpec& spec) {
  switch (spec.input_class) {
    case InputClass::gaussian_white: return gaussian_white(spec);
    case InputClass::m_sequence: return m_sequence(spec);
    case InputClass::ssr: return ssr(spec);
    case InputClass::modulated_dpss: {
      const DpssSet set = probe_basis(spec.geometry, spec.half_bandwidth_hz);
      return modulated_dpss(spec, set);
    }
  }
  throw std::logic_error("unreachable input class");
}

std::vector<double> add_output_noise(const std::vector<double>& signal,
                                     std::uint64_t seed, double variance) {
  if (variance < 0.0)
    throw std::invalid_argument("add_output_noise: variance must be nonnegative");
  if (variance == 0.0) return signal;
  GaussianDraws draws(seed);
  const double sd = std::sqrt(variance);
  std::vector<double> out(signal.size());
  for (std::size_t t = 0; t < signal.size(); ++t) out[t] = signal[t] + sd * draws();
  return out;
}

std::vector<int> odd_probe_orders(double nw) {
  if (!(nw > 0.0)) throw std::invalid_argument("odd_probe_orders: nw must be positive");
  std::vector<int> orders;
  const int max_order = static_cast<int>(std::llround(2.0 * nw)) - 1;
  for (int k = 1; k <= max_order; k += 2) orders.push_back(k);
  if (orders.empty())
    throw std::invalid_argument("odd_probe_orders: no odd order below 2NW");
  return orders;
}

DpssSet probe_basis(const Geometry& geo, double w_hz) {
  geo.check();
  if (!(w_hz > 0.0)) throw std::invalid_argument("probe_basis: w must be positive");
  const double nw = w_hz * geo.duration();
  const int k_count = static_cast<int>(std::llround(2.0 * nw));
  if (k_count < 1)
    throw std::invalid_argument("probe_basis: bandwidth too small for one sequence");
  return generate_dpss(geo.n, nw, k_count);
}

}  // namespace slepvolt
