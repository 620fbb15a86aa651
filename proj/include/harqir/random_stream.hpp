// Counter-based deterministic random streams.
//
// Each (seed, stream_id) pair yields an independent substream, so parallel
// workers and per-sample draws stay reproducible for any worker count: the
// estimate only depends on which indices are summed, not on who summed them.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace harqir {

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : state_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^
                   mix(stream_id + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform draw strictly inside (0,1); safe to pass to log().
  double u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// Two independent standard normals (Box-Muller).
  void normal_pair(double& z0, double& z1) {
    const double u1 = u01();
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  /// Circularly-symmetric complex normal with E|z|^2 = 1
  /// (independent real/imag parts of variance 1/2 each).
  std::complex<double> cnormal() {
    double z0, z1;
    normal_pair(z0, z1);
    return {z0 * 0.7071067811865475244, z1 * 0.7071067811865475244};
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace harqir
