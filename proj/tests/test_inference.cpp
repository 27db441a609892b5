#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "armamle/inference.hpp"
#include "armamle/report.hpp"
#include "oracle.hpp"

using namespace armamle;

namespace {

// Bisection for the level crossing of a decreasing function on [a, b].
template <class F>
double bisect(F f, double a, double b) {
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b);
        (f(a) > 0) == (f(m) > 0) ? a = m : b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST(Aic, Formula) {
    EXPECT_DOUBLE_EQ(aic(-100.0, ArmaOrder(2, 1)), 200.0 + 2 * 4);
    EXPECT_DOUBLE_EQ(aic(-100.0, ArmaOrder(2, 1, true)), 200.0 + 2 * 5);
}

TEST(LrTest, CutoffAndTailProbability) {
    // z_{0.975}^2 / 2 with z_{0.975} = 1.959963984540054.
    EXPECT_NEAR(lr_cutoff(0.95), 1.959963984540054 * 1.959963984540054 / 2, 1e-12);
    const auto t = lr_test(-100.0, -100.0 + lr_cutoff(0.95), 1);
    EXPECT_NEAR(t.p_value, 0.05, 1e-10);
    EXPECT_EQ(lr_test(-5.0, -5.0, 2).p_value, 1.0);
    // chi2_2 tail is exp(-x/2): 2 delta = 4 gives e^{-2}.
    EXPECT_NEAR(lr_test(0.0, 2.0, 2).p_value, std::exp(-2.0), 1e-12);
    EXPECT_THROW(lr_test(-10.0, -10.1, 1), InconsistentNestingError);
    EXPECT_NO_THROW(lr_test(-10.0, -10.0 - 5e-7, 1));
}

TEST(FisherSe, MatchesDenseOracleCurvature) {
    const auto x = oracle::simulate({0.5, -0.3}, {0.4}, 150, 31);
    const TimeSeries s(x);
    FitResult fit = fit_multistart(s, ArmaOrder(2, 1), MultistartConfig{});
    const auto fr = fisher_se(fit, s);
    ASSERT_FALSE(fr.singular);
    const auto v = to_vector(fit.params, fit.order);
    auto f = [&](std::vector<double> w) { return oracle::dense_concentrated(x, {w[0], w[1]}, {w[2]}, 0.0); };
    Eigen::Matrix3d H;
    const double h = 1e-4;
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            auto pp = v, pm = v, mp = v, mm = v;
            pp[i] += h; pp[k] += h;
            pm[i] += h; pm[k] -= h;
            mp[i] -= h; mp[k] += h;
            mm[i] -= h; mm[k] -= h;
            H(i, k) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
        }
    }
    const Eigen::Matrix3d cov = (-H).inverse();
    for (int i = 0; i < 3; ++i) {
        ASSERT_TRUE(fr.se[i].has_value());
        EXPECT_NEAR(*fr.se[i], std::sqrt(cov(i, i)), 2e-3 * std::sqrt(cov(i, i))) << i;
    }
}

TEST(FisherSe, Ar1NearAsymptoticValue) {
    const TimeSeries s(oracle::simulate({0.5}, {}, 4000, 5));
    const auto fit = fit_multistart(s, ArmaOrder(1, 0), MultistartConfig{});
    const auto fr = fisher_se(fit, s);
    const double phi = fit.params.phi[0];
    EXPECT_NEAR(*fr.se[0], std::sqrt((1 - phi * phi) / 4000), 0.05 * std::sqrt((1 - phi * phi) / 4000));
    EXPECT_FALSE(fr.boundary);
}

TEST(FisherSe, BoundaryIsFlagged) {
    FitResult fit;
    fit.order = ArmaOrder(1, 1);
    fit.params = {{0.3}, {0.995}, 1.0, 0.0};
    const TimeSeries s(oracle::simulate({0.3}, {0.9}, 100, 2));
    const auto fr = fisher_se(fit, s);
    EXPECT_TRUE(fr.boundary);
    fit.params.theta[0] = 1.0 - 1e-9;
    const auto edge = fisher_se(fit, s);
    EXPECT_TRUE(edge.boundary);
    EXPECT_FALSE(edge.se[1].has_value());
}

TEST(ProfileCi, Ar1MatchesExactLikelihoodRatioInterval) {
    // With one free coordinate the profile is the concentrated likelihood itself.
    const auto x = oracle::simulate({0.6}, {}, 120, 17);
    const TimeSeries s(x);
    auto fit = fit_multistart(s, ArmaOrder(1, 0), MultistartConfig{});
    const auto curve = profile_ci(s, fit, 0, ProfileConfig{}, MultistartConfig{});
    ASSERT_GE(curve.grid.size(), 41u);
    const double peak = oracle::dense_concentrated(x, fit.params.phi, {}, 0.0);
    const auto g = [&](double v) { return oracle::dense_concentrated(x, {v}, {}, 0.0) - (peak - 1.920729410347062); };
    const double lo = bisect(g, -0.99, fit.params.phi[0]);
    const double hi = bisect(g, fit.params.phi[0], 0.999);
    EXPECT_NEAR(curve.ci_low, lo, 2e-3);
    EXPECT_NEAR(curve.ci_high, hi, 2e-3);
    EXPECT_FALSE(curve.lower_open);
    EXPECT_FALSE(curve.upper_open);
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        EXPECT_NEAR(curve.profile_loglik[i], oracle::dense_concentrated(x, {curve.grid[i]}, {}, 0.0), 1e-6);
    }
}

TEST(ProfileCi, InnerMaximizationMatchesBruteForce) {
    const auto x = oracle::simulate({0.5}, {0.4}, 100, 23);
    const TimeSeries s(x);
    const auto fit = fit_multistart(s, ArmaOrder(1, 1), MultistartConfig{});
    ProfileConfig pc;
    pc.min_points = 11;
    const auto curve = profile_ci(s, fit, 0, pc, MultistartConfig{});
    for (std::size_t i = 0; i < curve.grid.size(); i += 3) {
        double best = -1e300;
        for (int k = -995; k <= 995; k += 5) {
            best = std::max(best, oracle::dense_concentrated(x, {curve.grid[i]}, {k / 1000.0}, 0.0));
        }
        // Profile maximizes over a continuum, the oracle over a 5e-3 grid.
        EXPECT_GE(curve.profile_loglik[i], best - 1e-6);
        EXPECT_LE(curve.profile_loglik[i], best + 1e-2);
    }
    // No grid point beats the MLE.
    for (double v : curve.profile_loglik) EXPECT_LE(v, fit.loglik + 1e-6);
}

TEST(ProfileCi, BadIndexThrows) {
    const TimeSeries s(oracle::simulate({0.6}, {}, 50, 1));
    const auto fit = fit_multistart(s, ArmaOrder(1, 0), MultistartConfig{});
    EXPECT_THROW(profile_ci(s, fit, 1, ProfileConfig{}, MultistartConfig{}), DimensionError);
}

TEST(Nesting, FindsEveryViolatedPair) {
    // 2 x 2 grid, row-major (p, q): (0,0) (0,1) (1,0) (1,1).
    const std::vector<double> ll{-10.0, -9.0, -9.5, -9.2};
    const auto v = find_inconsistencies(ll, 1, 1);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].smaller, std::make_pair(0, 1));
    EXPECT_EQ(v[0].larger, std::make_pair(1, 1));
    EXPECT_NEAR(v[0].loglik_gap, 0.2, 1e-12);
    EXPECT_TRUE(find_inconsistencies({-10.0, -9.0, -9.5, -9.0 - 5e-7}, 1, 1).empty());
    EXPECT_TRUE(find_inconsistencies({-10.0, NAN, -9.5, -11.0}, 1, 1).size() == 2);
}

TEST(AicTable, WhiteNoisePrefersWhiteNoise) {
    int zero_wins = 0;
    for (unsigned seed = 0; seed < 12; ++seed) {
        const TimeSeries s(oracle::simulate({}, {}, 200, seed));
        const auto t = build_aic_table(s, 1, 1, false, MultistartConfig{});
        EXPECT_TRUE(t.consistent());
        zero_wins += t.best() == std::make_pair(0, 0);
    }
    EXPECT_GT(zero_wins, 6);
}

TEST(AicTable, TextAndJsonAgree) {
    const TimeSeries s(oracle::simulate({0.5}, {0.3}, 120, 4));
    const auto t = build_aic_table(s, 2, 2, true, MultistartConfig{});
    const auto j = report::to_json(t);
    std::istringstream text(render_aic_table(t));
    std::string line;
    std::getline(text, line);  // header
    for (int p = 0; p <= 2; ++p) {
        std::getline(text, line);
        std::istringstream row(line);
        std::string label;
        row >> label;
        EXPECT_EQ(label, "AR" + std::to_string(p));
        for (int q = 0; q <= 2; ++q) {
            std::string cell;
            row >> cell;
            const bool mark = !cell.empty() && cell.back() == '*';
            if (mark) cell.pop_back();
            const double aic_json = j["cells"][p * 3 + q]["aic"].get<double>();
            EXPECT_NEAR(std::stod(cell), aic_json, 5e-4);
            EXPECT_EQ(mark, j["cells"][p * 3 + q]["implicated"].get<bool>());
        }
    }
    EXPECT_THROW(build_aic_table(s, 7, 0, false, MultistartConfig{}), PreconditionError);
}

TEST(AicTable, ReplayWithWindowZeroIsSingleStart) {
    const TimeSeries s(oracle::simulate({0.5, -0.2}, {0.3}, 80, 6));
    const MultistartConfig cfg;
    const auto t = build_aic_table(s, 2, 1, false, cfg);
    const auto single = build_aic_table(s, 2, 1, false, cfg, FitArm::Single);
    const auto ll0 = replay_table_logliks(t, 0, 1, cfg.improvement_eps);
    for (std::size_t i = 0; i < ll0.size(); ++i) EXPECT_EQ(ll0[i], single.cells[i].fit->loglik);
    const auto full = replay_table_logliks(t, cfg.M, cfg.max_starts, cfg.improvement_eps);
    for (std::size_t i = 0; i < full.size(); ++i) EXPECT_EQ(full[i], t.cells[i].fit->loglik);
}
