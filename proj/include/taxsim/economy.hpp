#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxsim/memory.hpp"
#include "taxsim/rng.hpp"

namespace taxsim {

/// Labor hours supplied by an employed household in one month.
inline constexpr double kHoursPerMonth = 168.0;

inline constexpr std::size_t kBracketCount = 7;

/// Monthly bracket lower bounds used by every tax system.
inline constexpr std::array<double, kBracketCount> kBracketThresholds{
    0.00, 808.33, 3289.58, 7016.67, 13393.75, 17008.33, 42525.00};

inline constexpr std::array<double, kBracketCount> kUsFederalRates{
    0.10, 0.12, 0.22, 0.24, 0.32, 0.35, 0.37};

/// Clamps to [0, 1] and rounds half-up onto a grid of 1/steps_per_unit.
/// Non-finite input maps to 0.
double snap_to_grid(double fraction, int steps_per_unit);

struct Persona {
    std::string name;
    int age = 0;
    std::string city;
    std::string occupation;

    /// Throws std::invalid_argument on an empty field or non-positive age.
    void validate() const;
};

struct HouseholdState {
    std::size_t id = 0;
    Persona persona;
    double hourly_wage = 0.0;
    double previous_wage = 0.0;  // wage in force last month
    double savings = 0.0;
    Decision decision;
    bool employed = false;
    double pretax_income = 0.0;
    double tax_paid = 0.0;
    double posttax_income = 0.0;
    double consumption_spent = 0.0;
    double goods_consumed = 0.0;
    std::string reflection_note;
    MemoryPool memory;
};

class ScheduleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bracketed marginal-rate schedule. Thresholds are lower bounds of each
/// bracket, strictly ascending from 0; the last bracket is unbounded.
class TaxSchedule {
public:
    /// Throws ScheduleError unless the schedule is valid.
    TaxSchedule(std::vector<double> thresholds, std::vector<double> rates);

    /// Schedule over kBracketThresholds.
    static TaxSchedule standard(std::span<const double> rates);
    static TaxSchedule us_federal();
    static TaxSchedule zero();

    [[nodiscard]] const std::vector<double>& thresholds() const { return thresholds_; }
    [[nodiscard]] const std::vector<double>& rates() const { return rates_; }
    [[nodiscard]] std::size_t size() const { return rates_.size(); }

    bool operator==(const TaxSchedule&) const = default;

private:
    std::vector<double> thresholds_;
    std::vector<double> rates_;
};

struct MarketState {
    double price = 126.78;
    double inventory = 0.0;
    double interest_rate = 0.03;
    double productivity = 1.0;
    double last_demand = 0.0;
    double last_supply = 0.0;
    double mismatch = 0.0;
};

/// Wage/price adjustment bounds and Taylor-rule constants.
struct AdjustmentParams {
    double wage_adjust_max = 0.05;
    double price_adjust_max = 0.10;
    double natural_rate = 0.01;
    double target_inflation = 0.02;
    double inflation_coefficient = 0.5;
    double unemployment_coefficient = 0.5;
    double natural_unemployment = 0.04;

    void validate() const;
};

// Production.

/// Realised labor turns into goods and pre-tax pay. Returns total supply S.
double produce(std::span<HouseholdState> households, MarketState& market);

// Taxation.

double compute_tax(const TaxSchedule& schedule, double income);

struct TaxationResult {
    std::vector<double> posttax;
    std::vector<double> taxes;
    double redistribution = 0.0;  // equal lump sum returned to everyone
};

TaxationResult apply_taxation(const TaxSchedule& schedule, std::span<const double> pretax);

/// Taxes each household's pretax_income and credits the post-tax amount to
/// its savings.
TaxationResult apply_taxation(const TaxSchedule& schedule, std::span<HouseholdState> households);

// Consumption.

/// Units wanted: propensity * wealth / price.
double plan_demand(double consumption_propensity, double wealth, double price);

struct ConsumptionResult {
    std::vector<double> goods;  // realised units per household, by id
    std::vector<double> spent;  // currency per household, by id
    double intended_demand = 0.0;
    double consumed = 0.0;
};

/// Households buy in a shuffled order until inventory runs out. Spending is
/// capped at savings so nobody borrows.
ConsumptionResult execute_consumption(std::span<HouseholdState> households,
                                      MarketState& market, Rng& rng);

// Market adjustment.

/// (D - G) / max(D, G), with an empty market defined as 0.
double compute_mismatch(double demand, double inventory);

/// Draws one wage multiplier per household in id order, then the price.
void adjust_wages_and_price(std::span<HouseholdState> households, MarketState& market,
                            double mismatch, const AdjustmentParams& params, Rng& rng);

// Financial market.

void accrue_interest(std::span<HouseholdState> households, double rate);

/// Taylor rule floored at zero.
double update_interest_rate(const AdjustmentParams& params, double inflation,
                            double unemployment);

}  // namespace taxsim
