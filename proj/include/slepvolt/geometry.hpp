#pragma once

// Shared experiment geometry: sampling, carrier, and frequency-resolution
// constants used by the signal generators, the system builders, and the
// experiment harness.

#include <stdexcept>

namespace slepvolt {

struct Geometry {
  int n = 240;               // samples per record
  double dt = 1.0 / 30.0;    // sample period, seconds
  double f0_hz = 2.0;        // probe carrier
  double fr_hz = 3.0 / 8.0;  // in-band tone spacing / deviation knee scale

  double duration() const { return n * dt; }
  double nyquist_hz() const { return 0.5 / dt; }
  double hz_to_cps(double f_hz) const { return f_hz * dt; }   // cycles per sample
  double cps_to_hz(double f) const { return f / dt; }

  void check() const {
    if (n < 2) throw std::runtime_error("geometry: n must be >= 2");
    if (!(dt > 0.0)) throw std::runtime_error("geometry: dt must be positive");
    if (f0_hz < 0.0 || f0_hz >= nyquist_hz())
      throw std::runtime_error("geometry: carrier must lie below Nyquist");
    if (!(fr_hz > 0.0)) throw std::runtime_error("geometry: fr must be positive");
  }
};

}  // namespace slepvolt
