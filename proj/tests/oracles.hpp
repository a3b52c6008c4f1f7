#pragma once

// Reference implementations used only by tests. Each one is written from the
// defining formula, without sharing code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

/// Tax in cents for a schedule and income that all lie on the cent grid.
/// Walks up through the brackets counting the cents that fall in each one and
/// charges each cent at its bracket's rate.
inline double tax_by_cent_counting(const std::vector<std::int64_t>& threshold_cents,
                                   const std::vector<double>& rates, std::int64_t income_cents) {
    double tax = 0.0;
    for (std::size_t k = 0; k < threshold_cents.size(); ++k) {
        const std::int64_t lo = threshold_cents[k];
        const std::int64_t hi =
            k + 1 < threshold_cents.size() ? threshold_cents[k + 1] : INT64_MAX;
        const std::int64_t cents = std::max<std::int64_t>(0, std::min(income_cents, hi) - lo);
        tax += static_cast<double>(cents) * rates[k];
    }
    return tax / 100.0;
}

/// Same quantity, one cent at a time. Only practical for modest incomes.
inline double tax_cent_by_cent(const std::vector<std::int64_t>& threshold_cents,
                               const std::vector<double>& rates, std::int64_t income_cents) {
    long double tax = 0.0L;
    std::size_t k = 0;
    for (std::int64_t c = 0; c < income_cents; ++c) {
        while (k + 1 < threshold_cents.size() && c >= threshold_cents[k + 1]) ++k;
        tax += static_cast<long double>(rates[k]);
    }
    return static_cast<double>(tax / 100.0L);
}

/// Mean absolute pairwise difference over twice the mean.
inline double gini_pairwise(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double total = 0.0;
    for (double v : x) total += v;
    if (total == 0.0) return 0.0;
    long double diff = 0.0L;
    for (double a : x) {
        for (double b : x) diff += std::fabs(a - b);
    }
    const double mean = total / n;
    return static_cast<double>(diff / (2.0L * n * n * mean));
}

/// Fraction of values <= z, by linear scan.
inline double cdf(const std::vector<double>& x, double z) {
    std::size_t count = 0;
    for (double v : x) count += v <= z ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(x.size());
}

/// Share of values in [lo, hi) divided by the bin width.
inline double bin_density(const std::vector<double>& x, double lo, double hi) {
    std::size_t count = 0;
    for (double v : x) count += (v >= lo && v < hi) ? 1 : 0;
    return static_cast<double>(count) / (static_cast<double>(x.size()) * (hi - lo));
}

/// Saez rates over the given brackets: midpoint formula below the top,
/// Pareto formula at the top threshold.
inline std::vector<double> saez_rates(const std::vector<double>& positive_incomes,
                                      const std::vector<double>& thresholds, double e) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < thresholds.size(); ++k) {
        const double lo = thresholds[k];
        const double hi = thresholds[k + 1];
        const double z = (lo + hi) / 2.0;
        const double G = cdf(positive_incomes, z);
        const double g = bin_density(positive_incomes, lo, hi);
        double t = (1.0 - G + e * z * g) / (1.0 + e * g);
        out.push_back(std::min(1.0, std::max(0.0, t)));
    }
    const double z_star = thresholds.back();
    double sum = 0.0;
    int count = 0;
    for (double v : positive_incomes) {
        if (v > z_star) {
            sum += v;
            ++count;
        }
    }
    const double zbar = sum / count;
    const double a = zbar / (zbar - z_star);
    out.push_back(1.0 / (1.0 + a * e));
    return out;
}

/// Taylor rule written out term by term.
inline double taylor(double rn, double pit, double a_pi, double a_u, double un, double pi,
                     double u) {
    const double r = rn + pit + a_pi * (pi - pit) + a_u * (un - u);
    return r < 0.0 ? 0.0 : r;
}

}  // namespace oracle
