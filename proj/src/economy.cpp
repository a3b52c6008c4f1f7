#include "taxsim/economy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace taxsim {

double snap_to_grid(double fraction, int steps_per_unit) {
    if (!std::isfinite(fraction)) return 0.0;
    const double steps = static_cast<double>(steps_per_unit);
    // The epsilon keeps decimal ties such as 0.83 * 50 from rounding down.
    const double k = std::floor(std::clamp(fraction, 0.0, 1.0) * steps + 0.5 + 1e-9);
    return k / steps;
}

void Persona::validate() const {
    if (name.empty() || city.empty() || occupation.empty()) {
        throw std::invalid_argument("persona fields must be non-empty");
    }
    if (age <= 0) {
        throw std::invalid_argument("persona '" + name + "' has non-positive age");
    }
}

TaxSchedule::TaxSchedule(std::vector<double> thresholds, std::vector<double> rates)
    : thresholds_(std::move(thresholds)), rates_(std::move(rates)) {
    if (thresholds_.empty()) throw ScheduleError("tax schedule has no brackets");
    if (thresholds_.size() != rates_.size()) {
        throw ScheduleError("tax schedule has " + std::to_string(thresholds_.size()) +
                            " thresholds but " + std::to_string(rates_.size()) + " rates");
    }
    if (thresholds_.front() != 0.0) throw ScheduleError("first bracket must start at 0");
    for (std::size_t k = 1; k < thresholds_.size(); ++k) {
        if (!(thresholds_[k] > thresholds_[k - 1])) {
            throw ScheduleError("bracket thresholds must be strictly increasing");
        }
    }
    for (double rate : rates_) {
        if (!(rate >= 0.0 && rate <= 1.0)) throw ScheduleError("tax rate outside [0, 1]");
    }
}

TaxSchedule TaxSchedule::standard(std::span<const double> rates) {
    return {{kBracketThresholds.begin(), kBracketThresholds.end()}, {rates.begin(), rates.end()}};
}

TaxSchedule TaxSchedule::us_federal() { return standard(kUsFederalRates); }

TaxSchedule TaxSchedule::zero() { return standard(std::array<double, kBracketCount>{}); }

void AdjustmentParams::validate() const {
    if (!(wage_adjust_max > 0.0 && wage_adjust_max <= 1.0)) {
        throw std::invalid_argument("wage_adjust_max must lie in (0, 1]");
    }
    if (!(price_adjust_max > 0.0 && price_adjust_max <= 1.0)) {
        throw std::invalid_argument("price_adjust_max must lie in (0, 1]");
    }
}

double produce(std::span<HouseholdState> households, MarketState& market) {
    double supply = 0.0;
    for (auto& h : households) {
        const double labor = h.employed ? 1.0 : 0.0;
        supply += labor * kHoursPerMonth * market.productivity;
        h.pretax_income = labor * kHoursPerMonth * h.hourly_wage;
    }
    market.inventory += supply;
    market.last_supply = supply;
    return supply;
}

double compute_tax(const TaxSchedule& schedule, double income) {
    if (!(income >= 0.0)) throw std::invalid_argument("income must be non-negative");
    const auto& b = schedule.thresholds();
    const auto& rate = schedule.rates();
    double tax = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
        if (income <= b[k]) break;
        const bool top = k + 1 == b.size();
        const double upper = top ? income : std::min(income, b[k + 1]);
        tax += rate[k] * (upper - b[k]);
    }
    return tax;
}

TaxationResult apply_taxation(const TaxSchedule& schedule, std::span<const double> pretax) {
    TaxationResult out;
    out.taxes.reserve(pretax.size());
    for (double z : pretax) out.taxes.push_back(compute_tax(schedule, z));
    if (!pretax.empty()) {
        out.redistribution = std::accumulate(out.taxes.begin(), out.taxes.end(), 0.0) /
                             static_cast<double>(pretax.size());
    }
    out.posttax.reserve(pretax.size());
    for (std::size_t i = 0; i < pretax.size(); ++i) {
        out.posttax.push_back(pretax[i] - out.taxes[i] + out.redistribution);
    }
    return out;
}

TaxationResult apply_taxation(const TaxSchedule& schedule, std::span<HouseholdState> households) {
    std::vector<double> pretax;
    pretax.reserve(households.size());
    for (const auto& h : households) pretax.push_back(h.pretax_income);
    auto result = apply_taxation(schedule, pretax);
    for (std::size_t i = 0; i < households.size(); ++i) {
        households[i].tax_paid = result.taxes[i];
        households[i].posttax_income = result.posttax[i];
        households[i].savings += result.posttax[i];
    }
    return result;
}

double plan_demand(double consumption_propensity, double wealth, double price) {
    if (!(price > 0.0)) throw std::invalid_argument("price must be positive");
    return std::max(0.0, consumption_propensity * wealth / price);
}

ConsumptionResult execute_consumption(std::span<HouseholdState> households, MarketState& market,
                                      Rng& rng) {
    ConsumptionResult out;
    out.goods.assign(households.size(), 0.0);
    out.spent.assign(households.size(), 0.0);

    std::vector<std::size_t> order(households.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));

    for (std::size_t i : order) {
        auto& h = households[i];
        const double wanted = plan_demand(h.decision.consumption, h.savings, market.price);
        out.intended_demand += wanted;

        double units = std::min(wanted, market.inventory);
        double cost = units * market.price;
        if (cost > h.savings) {
            cost = h.savings;
            units = cost / market.price;
        }
        h.savings = std::max(0.0, h.savings - cost);
        market.inventory = std::max(0.0, market.inventory - units);
        h.consumption_spent = cost;
        h.goods_consumed = units;
        out.goods[i] = units;
        out.spent[i] = cost;
        out.consumed += units;
    }
    market.last_demand = out.intended_demand;
    return out;
}

double compute_mismatch(double demand, double inventory) {
    const double scale = std::max(demand, inventory);
    if (scale <= 0.0) return 0.0;
    return std::clamp((demand - inventory) / scale, -1.0, 1.0);
}

namespace {

double draw_adjustment(double mismatch, double max_rate, Rng& rng) {
    const double sign = mismatch > 0.0 ? 1.0 : (mismatch < 0.0 ? -1.0 : 0.0);
    return sign * rng.uniform(0.0, max_rate * std::abs(mismatch));
}

}  // namespace

void adjust_wages_and_price(std::span<HouseholdState> households, MarketState& market,
                            double mismatch, const AdjustmentParams& params, Rng& rng) {
    for (auto& h : households) {
        h.hourly_wage *= 1.0 + draw_adjustment(mismatch, params.wage_adjust_max, rng);
    }
    market.price *= 1.0 + draw_adjustment(mismatch, params.price_adjust_max, rng);
    market.mismatch = mismatch;
}

void accrue_interest(std::span<HouseholdState> households, double rate) {
    for (auto& h : households) h.savings *= 1.0 + rate;
}

double update_interest_rate(const AdjustmentParams& p, double inflation, double unemployment) {
    const double rate = p.natural_rate + p.target_inflation +
                        p.inflation_coefficient * (inflation - p.target_inflation) +
                        p.unemployment_coefficient * (p.natural_unemployment - unemployment);
    return std::max(rate, 0.0);
}

}  // namespace taxsim
