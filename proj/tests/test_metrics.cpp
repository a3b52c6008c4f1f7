#include <gtest/gtest.h>

#include "oracles.hpp"
#include "taxsim/metrics.hpp"
#include "taxsim/rng.hpp"

using namespace taxsim;

TEST(Gini, Fixtures) {
    EXPECT_DOUBLE_EQ(gini(std::vector<double>{1, 1, 1, 1}), 0.0);
    EXPECT_DOUBLE_EQ(gini(std::vector<double>{0, 0, 0, 5}), 0.75);
    EXPECT_DOUBLE_EQ(gini(std::vector<double>{0, 0, 0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(gini(std::vector<double>{42}), 0.0);
    EXPECT_THROW(gini(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(gini(std::vector<double>{1, -1}), std::invalid_argument);
}

TEST(Gini, MatchesPairwiseOracle) {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(1 + rng.below(80));
        for (auto& v : x) v = rng.bernoulli(0.2) ? 0.0 : rng.lognormal(1000.0, 1.5);
        EXPECT_NEAR(gini(x), oracle::gini_pairwise(x), 1e-9);
    }
}

TEST(Gini, ScaleAndPermutationInvariant) {
    std::vector<double> x{3, 9, 1, 27, 0, 4};
    const double g = gini(x);
    std::vector<double> scaled;
    for (double v : x) scaled.push_back(v * 7.5);
    EXPECT_NEAR(gini(scaled), g, 1e-12);
    std::vector<double> reordered{27, 0, 4, 1, 9, 3};
    EXPECT_DOUBLE_EQ(gini(reordered), g);
}

TEST(Equality, Fixtures) {
    EXPECT_DOUBLE_EQ(equality(std::vector<double>{1, 1, 1, 1}), 0.75);
    EXPECT_DOUBLE_EQ(equality(std::vector<double>{0, 0, 0, 3}), 0.1875);
    EXPECT_NEAR(equality(std::vector<double>(50, 1234.5)), 0.98, 1e-12);
}

TEST(Productivity, Modes) {
    const std::vector<double> w{10, 20, 30};
    EXPECT_DOUBLE_EQ(productivity(w), 20.0);
    EXPECT_DOUBLE_EQ(productivity(w, ProductivityMode::total), 60.0);
    EXPECT_DOUBLE_EQ(social_outcome(0.5, 20.0), 10.0);
}

TEST(Snapshot, CombinesMetrics) {
    const std::vector<double> w{0, 0, 0, 8};
    const auto s = snapshot(3, w);
    EXPECT_EQ(s.month, 3u);
    EXPECT_DOUBLE_EQ(s.gini, 0.75);
    EXPECT_DOUBLE_EQ(s.equality, 0.1875);
    EXPECT_DOUBLE_EQ(s.productivity, 2.0);
    EXPECT_DOUBLE_EQ(s.social_outcome, 0.375);
    EXPECT_FALSE(s.inflation.has_value());
}

TEST(Inflation, ComparesLastTwoYears) {
    std::vector<double> prices(12, 100.0);
    EXPECT_DOUBLE_EQ(annual_inflation(prices), 0.0);
    prices.insert(prices.end(), 12, 110.0);
    EXPECT_NEAR(annual_inflation(prices), 0.10, 1e-12);
    prices.insert(prices.end(), 12, 99.0);
    EXPECT_NEAR(annual_inflation(prices), -0.10, 1e-12);
    prices.push_back(500.0);  // partial year ignored
    EXPECT_NEAR(annual_inflation(prices), -0.10, 1e-12);
}

TEST(Unemployment, FractionOfIdleHouseholdMonths) {
    std::vector<std::vector<bool>> labor(12, std::vector<bool>{true, true, false, true});
    EXPECT_DOUBLE_EQ(annual_unemployment(labor), 0.25);
    labor.pop_back();
    EXPECT_THROW(annual_unemployment(labor), std::invalid_argument);
    labor.push_back({true});
    EXPECT_THROW(annual_unemployment(labor), std::invalid_argument);
}
