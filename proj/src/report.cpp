#include "taxsim/report.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "taxsim/format.hpp"

namespace taxsim {

namespace {

std::string num(double v) { return fixed(v, 6); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string monthly_csv(const SimulationResult& result) {
    std::string out = "month,price,inventory,interest_rate";
    for (std::size_t k = 1; k <= kBracketCount; ++k) out += ",rate_" + std::to_string(k);
    out += ",gini,equality,productivity,social_outcome\n";
    for (const auto& m : result.months) {
        out += std::to_string(m.month) + "," + num(m.price) + "," + num(m.inventory) + "," +
               num(m.interest_rate);
        for (double r : m.schedule.rates()) out += "," + num(r);
        out += "," + num(m.metrics.gini) + "," + num(m.metrics.equality) + "," +
               num(m.metrics.productivity) + "," + num(m.metrics.social_outcome) + "\n";
    }
    return out;
}

std::string annual_csv(const SimulationResult& result) {
    std::string out = "year,inflation,unemployment\n";
    for (const auto& y : result.years) {
        out += std::to_string(y.year) + "," + num(y.inflation) + "," + num(y.unemployment) + "\n";
    }
    return out;
}

std::string households_csv(const SimulationResult& result) {
    std::string out =
        "month,id,employed,hourly_wage,pretax_income,tax_paid,posttax_income,consumption,"
        "savings,work,consumption_propensity\n";
    for (const auto& h : result.households) {
        out += std::to_string(h.month) + "," + std::to_string(h.id) + "," +
               (h.employed ? "1" : "0") + "," + num(h.hourly_wage) + "," + num(h.pretax_income) +
               "," + num(h.tax_paid) + "," + num(h.posttax_income) + "," + num(h.consumption) +
               "," + num(h.savings) + "," + num(h.decision.work) + "," +
               num(h.decision.consumption) + "\n";
    }
    return out;
}

nlohmann::json summary_json(const SimulationResult& result) {
    const auto& s = result.summary;
    return {
        {"tax_system", to_string(result.config.tax_system)},
        {"household_backend", to_string(result.config.household_backend)},
        {"seed", result.config.seed},
        {"n_households", result.config.n_households},
        {"months", result.config.months},
        {"final_gini", num(s.final_gini)},
        {"final_equality", num(s.final_equality)},
        {"final_productivity", num(s.final_productivity)},
        {"final_social_outcome", num(s.final_social_outcome)},
        {"mean_inflation", num(s.mean_inflation)},
        {"mean_unemployment", num(s.mean_unemployment)},
        {"policy_fallbacks", s.policy_fallbacks},
        {"household_fallbacks", s.household_fallbacks},
        {"llm_requests", s.llm_requests},
    };
}

void write_outputs(const SimulationResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "monthly.csv", monthly_csv(result));
    write_file(dir / "annual.csv", annual_csv(result));
    write_file(dir / "summary.json", summary_json(result).dump(2) + "\n");
    if (result.config.write_household_rows) {
        write_file(dir / "households.csv", households_csv(result));
    }
}

std::string comparison_csv(const ComparisonTable& table) {
    std::string out =
        "system,seed,final_gini,final_equality,final_productivity,final_social_outcome,"
        "mean_inflation,mean_unemployment\n";
    for (const auto& row : table.rows) {
        const auto& s = row.summary;
        out += std::string(to_string(row.system)) + "," + std::to_string(row.seed) + "," +
               num(s.final_gini) + "," + num(s.final_equality) + "," +
               num(s.final_productivity) + "," + num(s.final_social_outcome) + "," +
               num(s.mean_inflation) + "," + num(s.mean_unemployment) + "\n";
    }
    return out;
}

std::string comparison_series_csv(const ComparisonTable& table) {
    std::size_t months = 0;
    for (const auto& row : table.rows) months = std::max(months, row.social_outcome.size());
    std::string out = "month";
    for (const auto& row : table.rows) {
        out += "," + std::string(to_string(row.system)) + "_" + std::to_string(row.seed);
    }
    out += "\n";
    for (std::size_t m = 0; m < months; ++m) {
        out += std::to_string(m + 1);
        for (const auto& row : table.rows) {
            out += ",";
            if (m < row.social_outcome.size()) out += num(row.social_outcome[m]);
        }
        out += "\n";
    }
    return out;
}

void write_comparison(const ComparisonTable& table, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "comparison.csv", comparison_csv(table));
    write_file(dir / "series.csv", comparison_series_csv(table));
    nlohmann::json means = nlohmann::json::object();
    for (const auto& [system, mean] : table.mean_social_outcome()) {
        means[std::string(to_string(system))] = num(mean);
    }
    write_file(dir / "means.json", means.dump(2) + "\n");
}

}  // namespace taxsim
