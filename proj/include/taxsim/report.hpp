#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "taxsim/simulation.hpp"

namespace taxsim {

// All numbers are written with six decimal places.

/// month, price, inventory, interest_rate, rate_1..rate_7, gini, equality,
/// productivity, social_outcome
std::string monthly_csv(const SimulationResult& result);

/// year, inflation, unemployment
std::string annual_csv(const SimulationResult& result);

/// One row per household per month.
std::string households_csv(const SimulationResult& result);

nlohmann::json summary_json(const SimulationResult& result);

/// Writes monthly.csv, annual.csv, summary.json and, when the config asks
/// for it, households.csv into `dir` (created if missing).
void write_outputs(const SimulationResult& result, const std::filesystem::path& dir);

/// system, seed and the final metrics of every row.
std::string comparison_csv(const ComparisonTable& table);

/// Per-month social outcome, one column per (system, seed).
std::string comparison_series_csv(const ComparisonTable& table);

/// comparison.csv, series.csv and means.json into `dir`.
void write_comparison(const ComparisonTable& table, const std::filesystem::path& dir);

}  // namespace taxsim
