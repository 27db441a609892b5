#include <gtest/gtest.h>

#include <cmath>

#include "armamle/core.hpp"

using namespace armamle;

TEST(TimeSeries, MomentsUseObservedValuesOnly) {
    TimeSeries s({1.0, 100.0, 3.0}, {false, true, false});
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(s.n_observed(), 2u);
    EXPECT_TRUE(s.has_missing());
    EXPECT_TRUE(s.is_missing(1));
    EXPECT_TRUE(std::isnan(s.values()[1]));
    EXPECT_DOUBLE_EQ(s.mean(), 2.0);
    EXPECT_DOUBLE_EQ(s.variance(), 1.0);
}

TEST(TimeSeries, RejectsBadInput) {
    EXPECT_THROW(TimeSeries(std::vector<double>{}), InvalidSeriesError);
    EXPECT_THROW(TimeSeries({1.0, NAN}), InvalidSeriesError);
    EXPECT_THROW(TimeSeries({1.0, 2.0}, {true, true}), InvalidSeriesError);
    EXPECT_THROW(TimeSeries({1.0, 2.0}, {true}), DimensionError);
    // A non-finite value is fine where it is masked.
    EXPECT_NO_THROW(TimeSeries({1.0, NAN}, {false, true}));
}

TEST(ArmaOrder, Dimensions) {
    const ArmaOrder o(2, 1, true);
    EXPECT_EQ(o.aic_dim(), 5);
    EXPECT_EQ(o.free_dim(), 4);
    EXPECT_EQ(o.state_dim(), 2);
    EXPECT_EQ(ArmaOrder(1, 3).state_dim(), 4);
    EXPECT_EQ(ArmaOrder(0, 0).state_dim(), 1);
    EXPECT_THROW(ArmaOrder(-1, 0), DimensionError);
}

TEST(ArmaParams, VectorRoundTripAndNames) {
    const ArmaOrder o(2, 1, true);
    const ArmaParams p{{0.5, -0.2}, {0.3}, 2.0, 7.0};
    const auto x = to_vector(p, o);
    ASSERT_EQ(x.size(), 4u);
    EXPECT_EQ(from_vector(x, o, 2.0), p);
    const auto names = parameter_names(o);
    EXPECT_EQ(names, (std::vector<std::string>{"phi1", "phi2", "theta1", "mean"}));
    EXPECT_EQ(parameter_index(o, "theta1"), 2);
    EXPECT_FALSE(parameter_index(o, "theta2").has_value());
    EXPECT_THROW(check_dimensions(ArmaParams{{0.5}, {}, 1.0, 0.0}, o), DimensionError);
}

TEST(Validity, ClassifiesCausalityInvertibilityVariance) {
    const ArmaOrder o(1, 1);
    EXPECT_TRUE(validate_params({{0.5}, {0.5}, 1.0, 0.0}, o).ok());
    EXPECT_FALSE(validate_params({{1.0}, {0.5}, 1.0, 0.0}, o).causal);
    EXPECT_FALSE(validate_params({{0.5}, {-1.2}, 1.0, 0.0}, o).invertible);
    EXPECT_FALSE(validate_params({{0.5}, {0.5}, 0.0, 0.0}, o).positive_variance);
    // AR(2) triangle corners: phi2 = -1 lies on the boundary.
    EXPECT_FALSE(validate_params({{0.0, -1.0}, {}, 1.0, 0.0}, ArmaOrder(2, 0)).causal);
    EXPECT_TRUE(validate_params({{1.2, -0.5}, {}, 1.0, 0.0}, ArmaOrder(2, 0)).causal);
    EXPECT_FALSE(validate_params({{0.6, 0.5}, {}, 1.0, 0.0}, ArmaOrder(2, 0)).causal);
}

TEST(Validity, BoundaryToleranceIsOneSided) {
    // A root at modulus 1 + 1e-9 is treated as on the circle; 1 + 1e-6 is fine.
    const ArmaOrder o(1, 0);
    EXPECT_FALSE(validate_params({{1.0 / (1.0 + 1e-9)}, {}, 1.0, 0.0}, o).causal);
    EXPECT_TRUE(validate_params({{1.0 / (1.0 + 1e-6)}, {}, 1.0, 0.0}, o).causal);
}
