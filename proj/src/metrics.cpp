#include "taxsim/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace taxsim {

double gini(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("gini of an empty vector");
    std::vector<double> sorted(values.begin(), values.end());
    for (double x : sorted) {
        if (x < 0.0) throw std::invalid_argument("gini requires non-negative values");
    }
    std::sort(sorted.begin(), sorted.end());
    const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    if (total <= 0.0) return 0.0;

    // sum_i sum_j |x_i - x_j| = 2 * sum_i (2i - n - 1) x_(i), 1-based ranks.
    const auto n = static_cast<double>(sorted.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * sorted[i];
    }
    return std::clamp(weighted / (n * total), 0.0, 1.0);
}

double equality(std::span<const double> values) {
    const double g = gini(values);
    const auto n = static_cast<double>(values.size());
    return (1.0 - g) * (n - 1.0) / n;
}

double productivity(std::span<const double> values, ProductivityMode mode) {
    if (values.empty()) throw std::invalid_argument("productivity of an empty vector");
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    return mode == ProductivityMode::total ? total : total / static_cast<double>(values.size());
}

double social_outcome(double equality, double productivity) { return equality * productivity; }

double annual_inflation(std::span<const double> monthly_prices) {
    const std::size_t years = monthly_prices.size() / 12;
    if (years < 2) return 0.0;
    auto year_mean = [&](std::size_t year) {
        const auto first = monthly_prices.begin() + static_cast<std::ptrdiff_t>(year * 12);
        return std::accumulate(first, first + 12, 0.0) / 12.0;
    };
    const double previous = year_mean(years - 2);
    const double current = year_mean(years - 1);
    return (current - previous) / previous;
}

double annual_unemployment(const std::vector<std::vector<bool>>& labor) {
    if (labor.size() != 12) {
        throw std::invalid_argument("unemployment needs 12 months of labor, got " +
                                    std::to_string(labor.size()));
    }
    const std::size_t n = labor.front().size();
    if (n == 0) throw std::invalid_argument("unemployment needs at least one household");
    std::size_t idle = 0;
    for (const auto& month : labor) {
        if (month.size() != n) throw std::invalid_argument("ragged labor history");
        idle += static_cast<std::size_t>(std::count(month.begin(), month.end(), false));
    }
    return static_cast<double>(idle) / static_cast<double>(12 * n);
}

MetricSnapshot snapshot(std::size_t month, std::span<const double> wealth, ProductivityMode mode) {
    MetricSnapshot s;
    s.month = month;
    s.gini = gini(wealth);
    const auto n = static_cast<double>(wealth.size());
    s.equality = (1.0 - s.gini) * (n - 1.0) / n;
    s.productivity = productivity(wealth, mode);
    s.social_outcome = social_outcome(s.equality, s.productivity);
    return s;
}

}  // namespace taxsim
