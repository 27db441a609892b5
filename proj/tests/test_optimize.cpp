#include <gtest/gtest.h>

#include <cmath>

#include "armamle/optimize.hpp"
#include "oracle.hpp"

using namespace armamle;

TEST(Minimizers, QuadraticBowl) {
    const ScalarObjective f = [](std::span<const double> x) {
        return (x[0] - 1) * (x[0] - 1) + 10 * (x[1] + 2) * (x[1] + 2) + x[0] * x[1];
    };
    const BatchObjective fb = [&](std::span<const std::vector<double>> pts, std::span<double> out) {
        for (std::size_t i = 0; i < pts.size(); ++i) out[i] = f(pts[i]);
    };
    // Stationary point of the quadratic, solved by hand: [2 1; 1 20] x = [2; -40].
    const double x1 = (2 * 20 + 40) / 39.0, x2 = (-80 - 2) / 39.0;
    const auto r = minimize_bfgs(f, fb, {0.0, 0.0}, OptimizerConfig{});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], x1, 1e-4);
    EXPECT_NEAR(r.x[1], x2, 1e-4);
    OptimizerConfig nm;
    nm.method = OptimizerMethod::Simplex;
    nm.max_iters = 5000;
    nm.tol = 1e-12;
    const auto s = minimize_nelder_mead(f, {0.0, 0.0}, nm);
    EXPECT_NEAR(s.x[0], x1, 1e-3);
    EXPECT_NEAR(s.x[1], x2, 1e-3);
}

TEST(Minimizers, RespectsInfeasibleRegion) {
    // Minimum of (x-2)^2 over x < 1 is approached from inside.
    const ScalarObjective f = [](std::span<const double> x) {
        return x[0] < 1.0 ? (x[0] - 2) * (x[0] - 2) : std::numeric_limits<double>::infinity();
    };
    const BatchObjective fb = [&](std::span<const std::vector<double>> pts, std::span<double> out) {
        for (std::size_t i = 0; i < pts.size(); ++i) out[i] = f(pts[i]);
    };
    const auto r = minimize_bfgs(f, fb, {0.0}, OptimizerConfig{});
    EXPECT_LT(r.x[0], 1.0);
    EXPECT_GT(r.x[0], 0.9);
    EXPECT_TRUE(std::isfinite(r.f));
}

TEST(Gradient, MatchesDenseOracleDifferences) {
    const auto x = oracle::simulate({0.5, -0.2}, {0.3}, 60, 3);
    const TimeSeries s(x);
    const ArmaOrder o(2, 1);
    const LoglikEvaluator eval(s, o);
    const std::vector<double> at{0.4, -0.1, 0.2};
    const auto g = loglik_gradient(eval, at);
    for (int i = 0; i < 3; ++i) {
        auto up = at, dn = at;
        const double h = 1e-5;
        up[i] += h;
        dn[i] -= h;
        const auto f = [&](const std::vector<double>& v) {
            return oracle::dense_concentrated(x, {v[0], v[1]}, {v[2]}, 0.0);
        };
        EXPECT_NEAR(g[i], (f(up) - f(dn)) / (2 * h), 1e-4);
    }
}

TEST(MaximizeLoglik, Ar1AgreesWithGridSearch) {
    const double phi = 0.6;
    const auto x = oracle::simulate({phi}, {}, 500, 44);
    const TimeSeries s(x);
    const ArmaOrder o(1, 0);
    double best = -1e300, arg = 0.0;
    for (int k = -990; k <= 990; ++k) {
        const double v = k / 1000.0;
        const double ll = kalman_loglik(s, {{v}, {}, 1.0, 0.0}, o, true).loglik;
        if (ll > best) {
            best = ll;
            arg = v;
        }
    }
    // Start from a random valid point.
    const auto out = maximize_loglik(s, {{-0.7}, {}, 1.0, 0.0}, o, OptimizerConfig{});
    EXPECT_NEAR(out.params.phi[0], arg, 1e-3);
    EXPECT_GE(out.objective, best - 1e-9);
    EXPECT_LT(std::abs(out.params.phi[0] - phi), 3 * std::sqrt((1 - phi * phi) / 500));
    EXPECT_NEAR(out.params.sigma2, kalman_loglik(s, out.params, o, true).sigma2_hat, 1e-12);
}

TEST(MaximizeLoglik, NeverWorseThanStart) {
    const TimeSeries s(oracle::simulate({0.3, 0.2}, {0.5, 0.1}, 40, 5));
    const ArmaOrder o(2, 2, true);
    const LoglikEvaluator eval(s, o);
    for (int k = 0; k < 20; ++k) {
        const double a = -0.8 + 0.08 * k;
        const ArmaParams init{{a, 0.05}, {-a / 2, 0.1}, 1.0, 0.1};
        ASSERT_TRUE(validate_params(init, o).ok());
        const double f0 = eval(to_vector(init, o));
        for (auto method : {OptimizerMethod::QuasiNewton, OptimizerMethod::Simplex}) {
            OptimizerConfig cfg;
            cfg.method = method;
            const auto out = maximize_loglik(eval, init, cfg);
            EXPECT_GE(out.objective, f0);
            EXPECT_TRUE(validate_params(out.params, o).ok());
        }
    }
}

TEST(MaximizeLoglik, FixedCoordinatesStayPut) {
    const TimeSeries s(oracle::simulate({0.5}, {0.3}, 100, 6));
    const ArmaOrder o(1, 1);
    const LoglikEvaluator eval(s, o);
    const int fixed[1] = {1};
    const auto out = maximize_loglik(eval, {{0.1}, {0.25}, 1.0, 0.0}, OptimizerConfig{}, fixed);
    EXPECT_EQ(out.params.theta[0], 0.25);
}

TEST(MaximizeLoglik, InvalidStartIsAPreconditionError) {
    const TimeSeries s({1.0, 2.0, 3.0, 2.0});
    EXPECT_THROW(maximize_loglik(s, {{1.2}, {}, 1.0, 0.0}, ArmaOrder(1, 0), OptimizerConfig{}),
                 PreconditionError);
}

TEST(OptimizerConfig, Validation) {
    OptimizerConfig c;
    c.max_iters = 0;
    EXPECT_THROW(c.validate(), PreconditionError);
    c = OptimizerConfig{};
    c.tol = 0.0;
    EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(ZeroParams, UsesSampleMoments) {
    const TimeSeries s({2.0, 4.0});
    const auto z = zero_params(s, ArmaOrder(1, 2, true));
    EXPECT_EQ(z.phi, std::vector<double>{0.0});
    EXPECT_EQ(z.theta, (std::vector<double>{0.0, 0.0}));
    EXPECT_DOUBLE_EQ(z.mean, 3.0);
    EXPECT_DOUBLE_EQ(z.sigma2, 1.0);
}
