#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace taxsim {

enum class ProductivityMode {
    per_capita,  // mean wealth
    total,       // summed wealth
};

struct MetricSnapshot {
    std::size_t month = 0;
    double gini = 0.0;
    double equality = 0.0;
    double productivity = 0.0;
    double social_outcome = 0.0;
    std::optional<double> inflation;     // year-end months only
    std::optional<double> unemployment;  // year-end months only
};

/// Mean absolute pairwise difference over twice the mean. Values must be
/// non-negative; an all-zero vector has Gini 0. Throws on empty input.
double gini(std::span<const double> values);

/// (1 - gini) * (N - 1) / N.
double equality(std::span<const double> values);

double productivity(std::span<const double> values,
                    ProductivityMode mode = ProductivityMode::per_capita);

double social_outcome(double equality, double productivity);

/// Relative change between the mean price of the last complete year and the
/// year before it. Returns 0 until two complete years are available.
double annual_inflation(std::span<const double> monthly_prices);

/// Fraction of household-months not worked. Expects exactly 12 rows of
/// equal, non-zero width.
double annual_unemployment(const std::vector<std::vector<bool>>& labor);

/// Gini, equality, productivity and their product for one wealth vector.
MetricSnapshot snapshot(std::size_t month, std::span<const double> wealth,
                        ProductivityMode mode = ProductivityMode::per_capita);

}  // namespace taxsim
