#include <gtest/gtest.h>

#include <cmath>

#include "armamle/multistart.hpp"
#include "oracle.hpp"

using namespace armamle;

TEST(MultistartConfig, Validation) {
    MultistartConfig c;
    c.M = 0;
    EXPECT_THROW(c.validate(), PreconditionError);
    c = MultistartConfig{};
    c.improvement_eps = 0.0;
    EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(Multistart, DominatesSingleStart) {
    for (unsigned seed = 0; seed < 15; ++seed) {
        const TimeSeries s(oracle::simulate({0.7, -0.4, 0.2}, {0.5, 0.3, -0.2}, 50, seed));
        const ArmaOrder o(3, 3);
        MultistartConfig cfg;
        cfg.sampler.seed = 1000 + seed;
        const auto single = fit_single(s, o, cfg);
        const auto multi = fit_multistart(s, o, cfg);
        EXPECT_GE(multi.loglik, single.loglik - 1e-10);
        EXPECT_EQ(single.n_starts_used, 1);
        EXPECT_EQ(multi.per_start_logliks[0], single.loglik);
        EXPECT_EQ(static_cast<int>(multi.per_start_logliks.size()), multi.n_starts_used);
        EXPECT_EQ(multi.loglik, multi.per_start_logliks[multi.best_start]);
        EXPECT_NEAR(multi.aic, -2 * multi.loglik + 2 * o.aic_dim(), 1e-9);
    }
}

TEST(Multistart, StoppingRule) {
    const TimeSeries s(oracle::simulate({0.5}, {0.3}, 80, 2));
    MultistartConfig cfg;
    cfg.M = 4;
    const auto fit = fit_multistart(s, ArmaOrder(1, 1), cfg);
    // The last M starts did not improve on the running best by more than eps.
    const auto& ll = fit.per_start_logliks;
    ASSERT_GE(ll.size(), 5u);
    double best = ll[0];
    int stale = 0;
    for (std::size_t k = 1; k < ll.size(); ++k) {
        if (ll[k] > best + cfg.improvement_eps) {
            best = ll[k];
            stale = 0;
        } else {
            ++stale;
        }
    }
    EXPECT_EQ(stale, cfg.M);
    cfg.max_starts = 3;
    EXPECT_EQ(fit_multistart(s, ArmaOrder(1, 1), cfg).n_starts_used, 3);
}

TEST(Multistart, ReplayReproducesSmallerWindows) {
    const TimeSeries s(oracle::simulate({0.6, -0.3}, {0.4}, 60, 8));
    const ArmaOrder o(2, 2);
    MultistartConfig big;
    big.M = 12;
    const auto trace = fit_multistart(s, o, big);
    for (int M : {1, 2, 5, 12}) {
        MultistartConfig small = big;
        small.M = M;
        const auto direct = fit_multistart(s, o, small);
        const auto replay = replay_stopping(trace.per_start_logliks, M, small.max_starts, small.improvement_eps);
        EXPECT_EQ(replay.n_starts, direct.n_starts_used) << M;
        EXPECT_EQ(replay.loglik, direct.loglik) << M;
        EXPECT_EQ(replay.best_start, direct.best_start) << M;
    }
}

TEST(Multistart, ThreadCountDoesNotChangeResults) {
    const TimeSeries s(oracle::simulate({0.6, -0.3}, {0.4}, 70, 9));
    MultistartConfig a, b;
    b.threads = 3;
    const auto fa = fit_multistart(s, ArmaOrder(2, 1), a);
    const auto fb = fit_multistart(s, ArmaOrder(2, 1), b);
    EXPECT_EQ(fa.per_start_logliks, fb.per_start_logliks);
    EXPECT_EQ(fa.params, fb.params);
}

TEST(Multistart, MissingDataUsesZeroStart) {
    auto x = oracle::simulate({0.5}, {}, 50, 10);
    std::vector<bool> miss(50, false);
    miss[10] = miss[11] = true;
    const TimeSeries s(x, miss);
    const auto fit = fit_multistart(s, ArmaOrder(1, 0, true), MultistartConfig{});
    EXPECT_TRUE(fit.css_fallback);
    EXPECT_NEAR(fit.params.phi[0], 0.5, 0.35);
}

TEST(Replay, EmptyAndCap) {
    EXPECT_EQ(replay_stopping({}, 3, 10, 1e-5).n_starts, 0);
    const std::vector<double> ll{-10, -9, -8, -7, -6, -5};
    const auto r = replay_stopping(ll, 2, 4, 1e-5);
    EXPECT_EQ(r.n_starts, 4);
    EXPECT_EQ(r.best_start, 3);
}
