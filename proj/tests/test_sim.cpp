#include <gtest/gtest.h>

#include <cmath>

#include "armamle/poly.hpp"
#include "armamle/sim.hpp"

using namespace armamle;

namespace {

double lag1_acf(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= x.size();
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        c0 += (x[t] - m) * (x[t] - m);
        if (t) c1 += (x[t] - m) * (x[t - 1] - m);
    }
    return c1 / c0;
}

GeneratorSpec spec(std::vector<double> phi, std::vector<double> theta, int n, std::uint64_t seed) {
    GeneratorSpec g;
    g.order = ArmaOrder(static_cast<int>(phi.size()), static_cast<int>(theta.size()));
    g.params = {std::move(phi), std::move(theta), 1.0, 0.0};
    g.n = n;
    g.seed = seed;
    return g;
}

}  // namespace

TEST(Simulate, WhiteNoiseVariance) {
    const auto s = simulate(spec({}, {}, 100000, 1));
    EXPECT_NEAR(s.variance(), 1.0, 0.02);
}

TEST(Simulate, Ar1Autocorrelation) {
    const auto s = simulate(spec({0.5}, {}, 100000, 2));
    EXPECT_NEAR(lag1_acf(s.values()), 0.5, 0.01);
}

TEST(Simulate, Ma1Autocorrelation) {
    const auto s = simulate(spec({}, {0.4}, 100000, 3));
    EXPECT_NEAR(lag1_acf(s.values()), 0.4 / 1.16, 0.01);
}

TEST(Simulate, ReproducibleAndValidated) {
    const auto a = simulate(spec({0.5, -0.2}, {0.3}, 500, 9));
    const auto b = simulate(spec({0.5, -0.2}, {0.3}, 500, 9));
    ASSERT_EQ(a.size(), 500u);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
    EXPECT_THROW(simulate(spec({1.0}, {}, 10, 1)), PreconditionError);
    auto bad = spec({0.5}, {}, 0, 1);
    EXPECT_THROW(simulate(bad), PreconditionError);
    auto shifted = spec({0.5}, {}, 20000, 4);
    shifted.params.mean = 5.0;
    EXPECT_NEAR(simulate(shifted).mean(), 5.0, 0.05);
}

TEST(RandomGenerator, StudyConstraints) {
    Rng rng = make_rng(10);
    for (int k = 0; k < 300; ++k) {
        const auto g = random_generator(ArmaOrder(1 + k % 3, 1 + (k / 3) % 3), rng, 50);
        EXPECT_TRUE(validate_params(g.params, g.order).ok());
        const auto roots = poly::inv_roots(g.params);
        EXPECT_GE(poly::min_cross_distance(roots), 0.1 - 1e-9);
        EXPECT_LE(poly::max_inv_root_modulus(g.params.phi, poly::Kind::AR), 0.95 + 1e-9);
        EXPECT_LE(poly::max_inv_root_modulus(g.params.theta, poly::Kind::MA), 0.95 + 1e-9);
        EXPECT_EQ(g.params.sigma2, 1.0);
    }
}

TEST(Quantile, LinearInterpolation) {
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
    EXPECT_TRUE(std::isnan(quantile({}, 0.5)));
}

TEST(Histogram, CountsEveryFiniteValue) {
    const auto h = make_histogram({0.0, 0.1, 0.5, 1.0, NAN}, 4);
    ASSERT_EQ(h.counts.size(), 4u);
    EXPECT_EQ(h.counts[0] + h.counts[1] + h.counts[2] + h.counts[3], 4);
    EXPECT_EQ(h.counts[3], 1);
    EXPECT_DOUBLE_EQ(h.edges.front(), 0.0);
    EXPECT_DOUBLE_EQ(h.edges.back(), 1.0);
    EXPECT_TRUE(make_histogram({}, 3).counts.empty());
}

TEST(ImprovementStudy, DominanceAndBookkeeping) {
    StudyConfig cfg;
    cfg.replicates = 6;
    const auto rep = run_improvement_study({{2, 2, 50}, {1, 1, 100}}, cfg);
    ASSERT_EQ(rep.records.size(), 12u);
    for (const auto& r : rep.records) {
        ASSERT_TRUE(r.ok) << r.error;
        EXPECT_GE(r.loglik_multi, r.loglik_single - 1e-10);
        EXPECT_EQ(r.improved, r.delta > 1e-5);
    }
    for (const auto& s : rep.summary) {
        EXPECT_EQ(s.replicates + s.excluded, 6);
        EXPECT_GE(s.proportion, 0.0);
        EXPECT_LE(s.proportion, 1.0);
    }
    // Same seed, same study.
    const auto again = run_improvement_study({{2, 2, 50}, {1, 1, 100}}, cfg);
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        EXPECT_EQ(rep.records[i].loglik_multi, again.records[i].loglik_multi);
    }
    StudyConfig threaded = cfg;
    threaded.threads = 3;
    const auto par = run_improvement_study({{2, 2, 50}, {1, 1, 100}}, threaded);
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        EXPECT_EQ(rep.records[i].loglik_multi, par.records[i].loglik_multi);
    }
}

TEST(ConsistencyStudy, LargerWindowsNeverLowerAnyCell) {
    ConsistencyConfig cfg;
    cfg.study.replicates = 3;
    cfg.max_p = 2;
    cfg.max_q = 2;
    const auto rep = run_consistency_study(cfg);
    ASSERT_EQ(rep.records.size(), 3u);
    for (const auto& r : rep.records) {
        ASSERT_TRUE(r.ok) << r.error;
        ASSERT_EQ(r.consistent.size(), 3u);
    }
    for (double p : rep.consistent_proportion) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    }
    cfg.windows = {0};
    EXPECT_THROW(run_consistency_study(cfg), PreconditionError);
}

TEST(CoverageStudy, Ar1BothMethodsReported) {
    CoverageConfig cfg;
    cfg.study.replicates = 8;
    const auto rep = run_coverage_study({{"ar1", ArmaOrder(1, 0), {{0.7}, {}, 1.0, 0.0}, 200}}, cfg);
    ASSERT_EQ(rep.summary.size(), 1u);
    const auto& s = rep.summary[0];
    EXPECT_EQ(s.replicates, 8);
    EXPECT_GE(s.fisher_coverage, 0.5);
    EXPECT_GE(s.profile_coverage, 0.5);
    for (const auto& r : rep.records) {
        EXPECT_LT(r.wald_low[0], r.wald_high[0]);
        EXPECT_LT(r.profile_low[0], r.profile_high[0]);
    }
}

TEST(Bootstrap, ZeroReplicatesGiveEmptyHistograms) {
    BootstrapConfig cfg;
    cfg.study.replicates = 0;
    cfg.refit = ArmaOrder(1, 0);
    const auto rep = run_bootstrap_refit({{"ar1", ArmaOrder(1, 0), {{0.5}, {}, 1.0, 0.0}}}, cfg);
    EXPECT_TRUE(rep.records.empty());
    ASSERT_EQ(rep.histograms.size(), 1u);
    EXPECT_TRUE(rep.histograms[0].counts.empty());
}

TEST(Bootstrap, RefitConcentratesNearTruth) {
    BootstrapConfig cfg;
    cfg.study.replicates = 40;
    cfg.n = 400;
    cfg.refit = ArmaOrder(1, 1);
    const auto rep = run_bootstrap_refit({{"arma11", ArmaOrder(1, 1), {{0.7}, {-0.3}, 1.0, 0.0}}}, cfg);
    std::vector<double> phi;
    for (const auto& r : rep.records) {
        ASSERT_TRUE(r.ok);
        phi.push_back(r.estimates[0]);
    }
    EXPECT_NEAR(quantile(phi, 0.5), 0.7, 0.05);
}

TEST(NestedLr, DeltasAreNonNegative) {
    StudyConfig cfg;
    cfg.replicates = 10;
    const auto recs = run_nested_lr_study(spec({0.5}, {}, 100, 1), ArmaOrder(1, 0), ArmaOrder(2, 0), cfg);
    for (const auto& r : recs) {
        ASSERT_TRUE(r.ok);
        EXPECT_GE(r.delta, -1e-6);
    }
    EXPECT_THROW(run_nested_lr_study(spec({0.5}, {}, 100, 1), ArmaOrder(2, 0), ArmaOrder(1, 0), cfg),
                 PreconditionError);
}
