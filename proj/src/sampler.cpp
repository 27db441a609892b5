#include "armamle/sampler.hpp"

#include <numbers>
#include <sstream>

namespace armamle {

void SamplerConfig::validate() const {
    std::ostringstream msg;
    if (!(alpha > 0.0)) msg << "alpha must be positive; ";
    if (!(p_real >= 0.0 && p_real <= 1.0)) msg << "p_real must lie in [0,1]; ";
    if (!(same_sign_prob >= 0.0 && same_sign_prob <= 1.0)) msg << "same_sign_prob must lie in [0,1]; ";
    if (!(gamma > 0.0 && gamma < 0.5)) msg << "gamma must lie in (0, 0.5); ";
    if (!msg.str().empty()) throw PreconditionError("invalid sampler config: " + msg.str());
}

namespace {

std::vector<poly::Complex> sample_polynomial_roots(int k, const SamplerConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> radius(cfg.gamma, 1.0 - cfg.gamma);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::bernoulli_distribution is_real(cfg.p_real);
    std::bernoulli_distribution same_sign(cfg.same_sign_prob);
    std::bernoulli_distribution coin(0.5);

    std::vector<poly::Complex> roots;
    roots.reserve(static_cast<std::size_t>(k));
    for (int pair = 0; pair < k / 2; ++pair) {
        if (is_real(rng)) {
            const double m1 = radius(rng);
            const double m2 = radius(rng);
            const double s1 = coin(rng) ? 1.0 : -1.0;
            const double s2 = same_sign(rng) ? s1 : -s1;
            roots.emplace_back(s1 * m1, 0.0);
            roots.emplace_back(s2 * m2, 0.0);
        } else {
            const double tau = angle(rng);
            const double r = radius(rng);
            const poly::Complex z(r * std::cos(tau), r * std::sin(tau));
            roots.push_back(z);
            roots.push_back(std::conj(z));
        }
    }
    if (k % 2 == 1) {
        const double tau = coin(rng) ? 0.0 : std::numbers::pi;
        const double r = radius(rng);
        roots.emplace_back(r * std::cos(tau), 0.0);
    }
    return roots;
}

}  // namespace

poly::RootSet sample_root_set(const ArmaOrder& order, const SamplerConfig& cfg, Rng& rng,
                              int* rejections) {
    cfg.validate();
    int rejected = 0;
    for (int draw = 0; draw < kMaxSamplerDraws; ++draw) {
        poly::RootSet roots{sample_polynomial_roots(order.p, cfg, rng),
                            sample_polynomial_roots(order.q, cfg, rng)};
        if (poly::min_cross_distance(roots) >= cfg.alpha) {
            if (rejections) *rejections = rejected;
            return roots;
        }
        ++rejected;
    }
    std::ostringstream msg;
    msg << "root sampler exceeded " << kMaxSamplerDraws << " draws for " << to_string(order)
        << " with alpha=" << cfg.alpha << ", gamma=" << cfg.gamma;
    throw SamplerExhaustedError(msg.str());
}

ArmaParams sample_params(const ArmaOrder& order, const SamplerConfig& cfg, Rng& rng,
                         const TimeSeries* series) {
    const poly::RootSet roots = sample_root_set(order, cfg, rng);
    ArmaParams params;
    params.phi = poly::inv_roots_to_coeffs(roots.ar_inv_roots, poly::Kind::AR);
    params.theta = poly::inv_roots_to_coeffs(roots.ma_inv_roots, poly::Kind::MA);
    params.sigma2 = 1.0;
    params.mean = 0.0;
    if (series) {
        const double var = series->variance();
        if (var > 0.0) params.sigma2 = var;
        if (order.include_mean) params.mean = series->mean();
    }
    return params;
}

NaiveSamplingStats naive_uniform_ar_sampling(int p, int draws, Rng& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    NaiveSamplingStats stats;
    stats.draws = draws;
    long invalid = 0;
    long outside = 0;
    std::vector<double> phi(static_cast<std::size_t>(p));
    for (int d = 0; d < draws; ++d) {
        for (double& v : phi) v = unif(rng);
        bool bad = false;
        for (const auto& z : poly::coeffs_to_inv_roots(phi, poly::Kind::AR)) {
            if (std::abs(z) >= 1.0) {
                ++outside;
                bad = true;
            }
        }
        invalid += bad ? 1 : 0;
    }
    if (draws > 0) {
        stats.invalid_draw_fraction = static_cast<double>(invalid) / draws;
        stats.outside_root_fraction = static_cast<double>(outside) / (static_cast<double>(draws) * p);
    }
    return stats;
}

}  // namespace armamle
