#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "taxsim/economy.hpp"
#include "taxsim/households.hpp"
#include "taxsim/llm_gateway.hpp"
#include "taxsim/metrics.hpp"
#include "taxsim/tax_policy.hpp"

namespace taxsim {

struct InitialConditions {
    double wage_median = 25.0;  // per hour
    double wage_sigma = 0.8;
    double savings_median = 50000.0;
    double savings_sigma = 0.6;
    double price = 126.78;
    double inventory = 0.0;
};

struct GatewayConfig {
    GatewayMode mode = GatewayMode::live;
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    std::filesystem::path cache_path;
    std::vector<std::string> scripted_replies;
    int max_attempts = 5;
    int base_delay_ms = 1000;
    double backoff_factor = 2.0;
    int timeout_seconds = 120;
};

struct SimConfig {
    std::size_t n_households = 50;
    std::size_t months = 120;
    double productivity = 1.0;
    std::uint64_t seed = 0;
    TaxSystem tax_system = TaxSystem::us_federal;
    HouseholdBackendKind household_backend = HouseholdBackendKind::rule_based;
    std::size_t adjust_period_months = 3;
    std::size_t reflection_period_months = 3;
    std::size_t memory_capacity = MemoryPool::kDefaultCapacity;
    int start_year = 2001;
    ProductivityMode productivity_mode = ProductivityMode::per_capita;
    AdjustmentParams adjustment;
    SaezParams saez;
    TaxAgentConfig tax_agent;
    HouseholdLlmConfig household_llm;
    GatewayConfig gateway;
    InitialConditions initial;
    std::filesystem::path persona_roster;  // empty: the bundled roster
    std::filesystem::path output_dir = "out";
    bool write_household_rows = false;
    std::size_t max_concurrency = 1;  // parallel household LLM calls
    bool record_events = false;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;

    [[nodiscard]] bool needs_gateway() const {
        return tax_system == TaxSystem::tax_agent ||
               household_backend == HouseholdBackendKind::llm;
    }
};

/// Roster shipped with the project.
std::filesystem::path default_persona_roster();

struct MonthRecord {
    std::size_t month = 0;
    double price = 0.0;          // price at which goods traded this month
    double inventory = 0.0;      // end of month
    double interest_rate = 0.0;  // rate in force during the month
    TaxSchedule schedule = TaxSchedule::zero();
    double supply = 0.0;
    double demand = 0.0;  // intended
    double mismatch = 0.0;
    double total_pretax_income = 0.0;
    double total_tax = 0.0;
    double total_wealth = 0.0;
    double employment_rate = 0.0;
    MetricSnapshot metrics;
};

struct AnnualRecord {
    std::size_t year = 0;
    double inflation = 0.0;
    double unemployment = 0.0;
    double interest_rate = 0.0;  // Taylor-rule rate set at the year boundary
};

/// One household at the end of one month (before any year-end interest).
struct HouseholdMonthRow {
    std::size_t month = 0;
    std::size_t id = 0;
    bool employed = false;
    double hourly_wage = 0.0;  // wage that was paid this month
    double pretax_income = 0.0;
    double tax_paid = 0.0;
    double posttax_income = 0.0;
    double consumption = 0.0;
    double savings = 0.0;
    Decision decision;
};

struct RunSummary {
    double final_gini = 0.0;
    double final_equality = 0.0;
    double final_productivity = 0.0;
    double final_social_outcome = 0.0;
    double mean_inflation = 0.0;     // over years with a defined inflation
    double mean_unemployment = 0.0;  // over all completed years
    std::size_t policy_fallbacks = 0;
    std::size_t household_fallbacks = 0;
    std::size_t llm_requests = 0;
};

struct SimulationResult {
    SimConfig config;
    std::vector<MonthRecord> months;
    std::vector<AnnualRecord> years;
    std::vector<HouseholdMonthRow> households;
    RunSummary summary;
    std::vector<std::string> events;  // filled when config.record_events
};

/// Builds the gateway a config asks for. Live and record modes read the API
/// key from the configured environment variable.
std::unique_ptr<ChatGateway> make_gateway(const GatewayConfig& config);

/// Runs the monthly loop. `gateway` overrides the one built from the config;
/// it is only consulted when the config needs an LLM.
SimulationResult run(const SimConfig& config, ChatGateway* gateway = nullptr);

struct ComparisonRow {
    TaxSystem system = TaxSystem::us_federal;
    std::uint64_t seed = 0;
    RunSummary summary;
    std::vector<double> social_outcome;  // per month
    std::vector<double> gini;            // per month
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    /// Mean final social outcome per system, over the rows present.
    [[nodiscard]] std::map<TaxSystem, double> mean_social_outcome() const;
};

/// One run per config. All configs must share N, P and seed.
ComparisonTable compare(std::span<const SimConfig> configs);

/// compare() for every seed, with `base` specialised per system.
ComparisonTable sweep(const SimConfig& base, std::span<const TaxSystem> systems,
                      std::span<const std::uint64_t> seeds);

}  // namespace taxsim
