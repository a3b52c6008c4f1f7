#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "taxsim/tax_policy.hpp"

namespace taxsim {

void SaezParams::validate() const {
    if (!(elasticity >= 0.0)) throw std::invalid_argument("saez elasticity must be >= 0");
    if (!(density_bandwidth > 0.0)) throw std::invalid_argument("density_bandwidth must be > 0");
    if (!(tail_threshold > 0.0)) throw std::invalid_argument("tail_threshold must be > 0");
}

double pareto_parameter(std::span<const double> incomes, double tail_threshold) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double z : incomes) {
        if (z > tail_threshold) {
            sum += z;
            ++count;
        }
    }
    if (count == 0) throw TailEmptyError("no income above the tail threshold");
    const double tail_mean = sum / static_cast<double>(count);
    return tail_mean / (tail_mean - tail_threshold);
}

double top_rate(double pareto_a, double elasticity) { return 1.0 / (1.0 + pareto_a * elasticity); }

double marginal_rate(double cdf, double density, double elasticity, double income) {
    const double rate = ((1.0 - cdf) + elasticity * income * density) / (1.0 + elasticity * density);
    return std::clamp(rate, 0.0, 1.0);
}

namespace {

double empirical_cdf(std::span<const double> sorted, double z) {
    const auto le = std::upper_bound(sorted.begin(), sorted.end(), z) - sorted.begin();
    return static_cast<double>(le) / static_cast<double>(sorted.size());
}

double histogram_density(std::span<const double> sorted, double lo, double hi) {
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), lo);
    const auto last = std::lower_bound(sorted.begin(), sorted.end(), hi);
    const auto count = static_cast<double>(last - first);
    return count / (static_cast<double>(sorted.size()) * (hi - lo));
}

double kernel_density(std::span<const double> sorted, double z, double bandwidth) {
    double sum = 0.0;
    for (double x : sorted) {
        const double u = (z - x) / bandwidth;
        sum += std::exp(-0.5 * u * u);
    }
    return sum / (static_cast<double>(sorted.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

TaxSchedule saez_schedule(std::span<const double> incomes, std::span<const double> thresholds,
                          const SaezParams& params, double previous_top_rate) {
    std::vector<double> positive;
    for (double z : incomes) {
        if (z > 0.0) positive.push_back(z);
    }
    if (positive.size() < 2) {
        throw std::invalid_argument("saez schedule needs at least two positive incomes");
    }
    std::sort(positive.begin(), positive.end());
    const bool degenerate = positive.front() == positive.back();
    const double e = degenerate ? 0.0 : params.elasticity;

    const std::size_t brackets = thresholds.size();
    std::vector<double> rates(brackets);
    for (std::size_t k = 0; k + 1 < brackets; ++k) {
        const double lo = thresholds[k];
        const double hi = thresholds[k + 1];
        const double mid = 0.5 * (lo + hi);
        const double cdf = empirical_cdf(positive, mid);
        const double density = params.density == DensityEstimator::histogram
                                   ? histogram_density(positive, lo, hi)
                                   : kernel_density(positive, mid, params.density_bandwidth);
        rates[k] = marginal_rate(cdf, density, e, mid);
    }

    const double z_star = params.tail_threshold;
    if (degenerate) {
        rates[brackets - 1] = marginal_rate(empirical_cdf(positive, z_star), 0.0, 0.0, z_star);
    } else {
        try {
            rates[brackets - 1] = top_rate(pareto_parameter(positive, z_star), e);
        } catch (const TailEmptyError&) {
            rates[brackets - 1] = previous_top_rate;
        }
    }
    return TaxSchedule({thresholds.begin(), thresholds.end()}, std::move(rates));
}

}  // namespace taxsim
