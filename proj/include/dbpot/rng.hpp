#pragma once

#include <cstdint>

namespace dbpot {

// Stream purposes. Environment noise and driving noise are drawn from
// disjoint streams so quenched and annealed estimators share code paths.
enum class Purpose : std::uint64_t {
  Environment = 0x45u,
  Driving = 0x44u,
  Bessel = 0x42u,
  Aux = 0x41u,
};

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream keyed by (seed, replicate, purpose): output i is
// mix64(key + i*phi). Replicate-level fan-out stays bit-exact for any
// worker count because each replicate owns its own counter.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t replicate, Purpose purpose)
      : key_(derive_key(seed, replicate, purpose)) {}

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ + counter_);
  }

  // Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse CDF (one uniform per draw).
  double normal();

  double exponential(double rate) ;

  // Gamma(shape, scale), shape > 0. Marsaglia-Tsang, with the usual
  // U^{1/shape} boost when shape < 1.
  double gamma(double shape, double scale);

 private:
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t replicate,
                                  Purpose purpose) {
    std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ULL);
    k = mix64(k ^ (0xbf58476d1ce4e5b9ULL * (replicate + 1)));
    k = mix64(k ^ (static_cast<std::uint64_t>(purpose) * 0x94d049bb133111ebULL));
    return k;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Inverse standard normal CDF (Wichura's AS241, ~1e-15 absolute accuracy).
double inverse_normal_cdf(double p);

// Standard normal CDF and complementary CDF.
double normal_cdf(double x);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// log Gamma(x) for x > 0.
double log_gamma(double x);

}  // namespace dbpot
