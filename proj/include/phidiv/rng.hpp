#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace phidiv {

/// Engine for replication `rep` of stream `stream` under a master seed.
/// Derivation is pure arithmetic on the triple, so results never depend on
/// scheduling or worker count.
inline std::mt19937_64 rep_rng(std::uint64_t master, std::uint64_t rep,
                               std::uint64_t stream = 0) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
      static_cast<std::uint32_t>(rep),    static_cast<std::uint32_t>(rep >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform draw strictly inside (0,1), 53-bit resolution.
inline double uniform01_open(std::mt19937_64& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

inline double exponential_draw(std::mt19937_64& g) {
  return -std::log(uniform01_open(g));
}

/// Marsaglia polar method with a cached spare; avoids the
/// implementation-defined sequences of std::normal_distribution.
class NormalSampler {
 public:
  explicit NormalSampler(std::mt19937_64& g) : g_(g) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, r2;
    do {
      u = 2.0 * uniform01_open(g_) - 1.0;
      v = 2.0 * uniform01_open(g_) - 1.0;
      r2 = u * u + v * v;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64& g_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace phidiv
