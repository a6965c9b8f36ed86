#ifndef CTSNET_RNG_HPP
#define CTSNET_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace ctsnet {

// Seedable random stream with a split operation: split(k) yields a stream
// that is statistically independent of this one and of split(k') for k != k'.
// Draws are reproducible across platforms (mt19937_64 is specified by the
// standard; all variates below are derived from raw 64-bit output, never
// from std::*_distribution).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffffu),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  // Child stream keyed by index; derivation mixes the parent stream id so
  // nested splits do not collide.
  RngStream split(std::uint64_t index) const {
    return RngStream(seed_, mix(stream_) ^ (index + 1));
  }

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // (0, 1)
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // uniform on {0, ..., n-1}
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    // rejection to avoid modulo bias
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % un);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % un);
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// ln(1 - e^{-x}) for x > 0, stable near both ends.
inline double log1m_exp(double x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  if (x > 0.6931471805599453)  // ln 2
    return std::log1p(-std::exp(-x));
  return std::log(-std::expm1(-x));
}

// Inverse CDF of Exp(rate) at u in [0, 1).
inline double exponential_from_uniform(double rate, double u) {
  if (!(rate > 0)) throw std::invalid_argument("exponential: rate must be > 0");
  return -std::log1p(-u) / rate;
}

inline double sample_exponential(double rate, RngStream& rng) {
  // uniform_pos keeps the sampled holding times strictly positive, so no
  // two transitions can collide on a timestamp
  return exponential_from_uniform(rate, rng.uniform_pos());
}

// Inverse CDF of Exp(rate) conditioned on being < horizon, at u in [0, 1).
// Density q e^{-q t} / (1 - e^{-q h}) on [0, h).
inline double truncated_exponential_from_uniform(double rate, double horizon,
                                                 double u) {
  if (!(rate > 0))
    throw std::invalid_argument("truncated exponential: rate must be > 0");
  if (!(horizon > 0))
    throw std::invalid_argument("truncated exponential: horizon must be > 0");
  const double mass = -std::expm1(-rate * horizon);  // 1 - e^{-qh}
  return -std::log1p(-u * mass) / rate;
}

inline double sample_truncated_exponential(double rate, double horizon,
                                           RngStream& rng) {
  return truncated_exponential_from_uniform(rate, horizon, rng.uniform_pos());
}

inline double truncated_exponential_cdf(double rate, double horizon, double t) {
  if (t <= 0) return 0.0;
  if (t >= horizon) return 1.0;
  return -std::expm1(-rate * t) / -std::expm1(-rate * horizon);
}

}  // namespace ctsnet

#endif
