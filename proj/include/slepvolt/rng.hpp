#pragma once

// Deterministic randomness utilities.
//
// Every stochastic quantity in the library is drawn from an explicitly seeded
// std::mt19937_64. Independent streams derive their seeds from a master seed
// plus a list of integer coordinates (sweep indices, repetition number,
// stream purpose) through a splitmix64 chain, so any single record of a large
// experiment can be regenerated in isolation and adding a new stream never
// perturbs existing ones.
//
// Gaussian variates use an explicit Box-Muller transform instead of
// std::normal_distribution, whose algorithm is implementation-defined; this
// keeps output bit-identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace slepvolt {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Mix a master seed with stream coordinates into a subseed.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> coords) {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64_next(state);
  for (std::uint64_t c : coords) {
    state ^= c * 0xff51afd7ed558ccdULL + 0x2545f4914f6cdd1dULL + (out << 1);
    out = splitmix64_next(state);
  }
  return out;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
inline double uniform_unit(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Unbiased uniform integer in [0, n).
inline int uniform_index(std::mt19937_64& eng, int n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return static_cast<int>(x % bound);
}

// Standard-normal stream; caches the sine partner of each Box-Muller pair.
class GaussianDraws {
 public:
  explicit GaussianDraws(std::uint64_t seed) : eng_(seed) {}

  double operator()() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] so the logarithm is finite; u2 in [0, 1).
    const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  std::vector<double> take(int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& v : out) v = (*this)();
    return out;
  }

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace slepvolt
