#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "armamle/core.hpp"
#include "armamle/poly.hpp"

namespace armamle {

/// 64-bit Mersenne Twister; one stream per worker/start/replicate.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t base_seed, std::uint64_t stream = 0) {
    return Rng(base_seed + stream);
}

struct SamplerConfig {
    /// Minimum |lambda_i - nu_j| between AR and MA inverted roots.
    double alpha = 0.01;
    /// Probability that a root pair is real.
    double p_real = std::sqrt(0.5);
    /// Probability that the two members of a real pair share a sign. The
    /// default makes a pair's product positive with probability 1/2.
    double same_sign_prob = 1.0 - std::sqrt(0.5);
    /// Inverted-root moduli are drawn from U(gamma, 1 - gamma).
    double gamma = 0.05;
    std::uint64_t seed = 20240101;

    /// Throws PreconditionError on out-of-range fields.
    void validate() const;
};

class SamplerExhaustedError : public Error {
public:
    using Error::Error;
};

inline constexpr int kMaxSamplerDraws = 10000;

/// Draws inverted AR and MA roots: pairs (real with probability p_real),
/// an odd root on the real axis, all moduli in [gamma, 1 - gamma]; the whole
/// draw repeats until the AR/MA cross distance is at least alpha.
/// `rejections`, when given, receives the number of discarded draws.
poly::RootSet sample_root_set(const ArmaOrder& order, const SamplerConfig& cfg, Rng& rng,
                              int* rejections = nullptr);

/// sample_root_set followed by coefficient reconstruction. sigma2 and mean
/// come from the series moments when a series is given (else 1 and 0).
ArmaParams sample_params(const ArmaOrder& order, const SamplerConfig& cfg, Rng& rng,
                         const TimeSeries* series = nullptr);

/// Independent U(-1, 1) coefficients for an AR(p), the scheme the root
/// sampler replaces.
struct NaiveSamplingStats {
    int draws = 0;
    /// Fraction of coefficient vectors that are not causal.
    double invalid_draw_fraction = 0.0;
    /// Fraction of all inverted roots with modulus >= 1.
    double outside_root_fraction = 0.0;
};

NaiveSamplingStats naive_uniform_ar_sampling(int p, int draws, Rng& rng);

}  // namespace armamle
