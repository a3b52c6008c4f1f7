#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fake_llm.hpp"
#include "taxsim/config.hpp"
#include "taxsim/report.hpp"
#include "taxsim/simulation.hpp"

using namespace taxsim;

namespace {

SimConfig small(TaxSystem system, std::uint64_t seed = 7, std::size_t months = 24) {
    SimConfig c;
    c.n_households = 12;
    c.months = months;
    c.seed = seed;
    c.tax_system = system;
    return c;
}

std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(TAXSIM_TEST_FIXTURES) / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CountingTransport final : public ChatTransport {
public:
    std::string send(const ChatRequest& request) override {
        ++calls;
        return fake_llm::reply(request);
    }
    int calls = 0;
};

}  // namespace

TEST(Simulation, ProducesOneRowPerMonth) {
    const auto r = run(small(TaxSystem::us_federal));
    EXPECT_EQ(r.months.size(), 24u);
    EXPECT_EQ(r.years.size(), 2u);
    EXPECT_EQ(r.households.size(), 24u * 12u);
    EXPECT_EQ(r.months.front().month, 1u);
    EXPECT_TRUE(r.months[11].metrics.inflation.has_value());
    EXPECT_FALSE(r.months[10].metrics.inflation.has_value());
}

TEST(Simulation, DeterministicForFixedSeed) {
    const auto a = run(small(TaxSystem::free_market));
    const auto b = run(small(TaxSystem::free_market));
    EXPECT_EQ(monthly_csv(a), monthly_csv(b));
    EXPECT_EQ(annual_csv(a), annual_csv(b));
    EXPECT_EQ(households_csv(a), households_csv(b));
    EXPECT_NE(monthly_csv(a), monthly_csv(run(small(TaxSystem::free_market, 8))));
}

TEST(Simulation, StepOrder) {
    auto c = small(TaxSystem::us_federal, 1, 12);
    c.record_events = true;
    const auto r = run(c);
    auto index = [&](const std::string& e) {
        return std::find(r.events.begin(), r.events.end(), e) - r.events.begin();
    };
    for (std::size_t m = 1; m <= 12; ++m) {
        const auto M = std::to_string(m);
        EXPECT_LT(index(M + ":decide"), index(M + ":produce"));
        EXPECT_LT(index(M + ":produce"), index(M + ":tax"));
        EXPECT_LT(index(M + ":tax"), index(M + ":consume"));
        EXPECT_LT(index(M + ":consume"), index(M + ":adjust"));
        EXPECT_LT(index(M + ":adjust"), index(M + ":record"));
        const bool proposes = (m - 1) % 3 == 0;
        EXPECT_EQ(index(M + ":propose") < static_cast<long>(r.events.size()), proposes);
        if (proposes) EXPECT_LT(index(M + ":propose"), index(M + ":decide"));
        const bool reflects = m % 3 == 0;
        EXPECT_EQ(index(M + ":reflect") < static_cast<long>(r.events.size()), reflects);
        if (reflects) EXPECT_GT(index(M + ":reflect"), index(M + ":record"));
    }
    EXPECT_GT(index("12:annual"), index("12:reflect"));
    EXPECT_EQ(r.events.back(), "12:annual");
}

TEST(Simulation, UsFederalKeepsFixedRates) {
    const auto r = run(small(TaxSystem::us_federal));
    for (const auto& m : r.months) EXPECT_EQ(m.schedule, TaxSchedule::us_federal());
}

TEST(Simulation, FreeMarketCollectsNoTax) {
    const auto r = run(small(TaxSystem::free_market));
    for (const auto& m : r.months) EXPECT_EQ(m.total_tax, 0.0);
    for (const auto& h : r.households) EXPECT_EQ(h.tax_paid, 0.0);
}

TEST(Simulation, MetricsReproducibleFromHouseholdRows) {
    const auto r = run(small(TaxSystem::saez));
    const std::size_t n = r.config.n_households;
    for (const auto& m : r.months) {
        std::vector<double> wealth(n);
        for (const auto& h : r.households) {
            if (h.month == m.month) wealth[h.id] = h.savings;
        }
        const auto s = snapshot(m.month, wealth);
        EXPECT_EQ(s.gini, m.metrics.gini);
        EXPECT_EQ(s.equality, m.metrics.equality);
        EXPECT_EQ(s.productivity, m.metrics.productivity);
        EXPECT_EQ(s.social_outcome, m.metrics.social_outcome);
    }
}

TEST(Simulation, PerMonthInvariants) {
    for (auto system : {TaxSystem::free_market, TaxSystem::us_federal, TaxSystem::saez}) {
        const auto r = run(small(system, 3, 36));
        for (const auto& m : r.months) {
            EXPECT_GE(m.inventory, 0.0);
            EXPECT_GE(m.interest_rate, 0.0);
            EXPECT_GT(m.price, 0.0);
            EXPECT_GE(m.mismatch, -1.0);
            EXPECT_LE(m.mismatch, 1.0);
        }
        for (const auto& h : r.households) EXPECT_GE(h.savings, 0.0);
        for (const auto& y : r.years) {
            EXPECT_GE(y.unemployment, 0.0);
            EXPECT_LE(y.unemployment, 1.0);
        }
    }
}

TEST(Simulation, SaezMovesAwayFromBootstrapSchedule) {
    const auto r = run(small(TaxSystem::saez));
    EXPECT_EQ(r.months.front().schedule, TaxSchedule::us_federal());  // no incomes yet at month 1
    EXPECT_NE(r.months[3].schedule, TaxSchedule::us_federal());
    for (const auto& m : r.months) {
        EXPECT_EQ(m.schedule.thresholds(),
                  std::vector<double>(kBracketThresholds.begin(), kBracketThresholds.end()));
    }
}

TEST(Simulation, RuleBasedRunMakesNoLlmCalls) {
    auto gw = std::make_unique<ChatGateway>(GatewayMode::live, std::make_unique<CountingTransport>());
    const auto r = run(small(TaxSystem::saez), gw.get());
    EXPECT_EQ(r.summary.llm_requests, 0u);
    EXPECT_EQ(gw->request_count(), 0u);
}

TEST(Simulation, LlmBackendWithScriptedResponder) {
    auto c = small(TaxSystem::tax_agent, 5, 12);
    c.household_backend = HouseholdBackendKind::llm;
    auto gw = ChatGateway::scripted(fake_llm::reply);
    const auto r = run(c, gw.get());
    EXPECT_EQ(r.months.size(), 12u);
    // 12 decisions + 4 reflections per household, plus 4 planner calls
    EXPECT_EQ(r.summary.llm_requests, 12u * 12u + 4u * 12u + 4u);
    EXPECT_EQ(r.summary.household_fallbacks, 0u);
    EXPECT_EQ(r.summary.policy_fallbacks, 0u);
    EXPECT_NE(r.months[4].schedule, TaxSchedule::us_federal());
}

TEST(Simulation, ConcurrentFanOutMatchesSequential) {
    auto c = small(TaxSystem::tax_agent, 5, 12);
    c.household_backend = HouseholdBackendKind::llm;
    auto seq_gw = ChatGateway::scripted(fake_llm::reply);
    const auto seq = run(c, seq_gw.get());
    c.max_concurrency = 4;
    auto par_gw = ChatGateway::scripted(fake_llm::reply);
    const auto par = run(c, par_gw.get());
    EXPECT_EQ(monthly_csv(seq), monthly_csv(par));
    EXPECT_EQ(households_csv(seq), households_csv(par));
}

TEST(Simulation, MissingRosterIsFatal) {
    auto c = small(TaxSystem::us_federal);
    c.persona_roster = "/nonexistent/personas.csv";
    EXPECT_THROW(run(c), std::runtime_error);
}

TEST(Simulation, LiveModeNeedsApiKey) {
    auto c = small(TaxSystem::tax_agent);
    c.gateway.mode = GatewayMode::live;
    c.gateway.api_key_env = "TAXSIM_TEST_UNSET_KEY";
    EXPECT_THROW(run(c), std::invalid_argument);
}

TEST(Replay, FixtureCacheReproducesRun) {
    const auto config = load_config(fixture("replay_config.json"));
    const auto a = run(config);
    const auto b = run(config);
    EXPECT_EQ(monthly_csv(a), monthly_csv(b));
    EXPECT_EQ(annual_csv(a), annual_csv(b));
    EXPECT_EQ(a.summary.household_fallbacks, 0u);
    EXPECT_EQ(a.summary.policy_fallbacks, 0u);
    EXPECT_GT(a.summary.llm_requests, 0u);
}

TEST(Replay, FixtureCacheMatchesFakeModel) {
    // Regenerating the fixture with the fake model yields the committed
    // exchanges, in the same order.
    const auto config = load_config(fixture("replay_config.json"));
    const auto tmp = std::filesystem::temp_directory_path() / "taxsim_fixture_drift.jsonl";
    std::filesystem::remove(tmp);
    {
        ChatGateway gw(GatewayMode::record,
                       std::make_unique<ScriptedTransport>(fake_llm::reply), tmp);
        run(config, &gw);
    }
    auto exchanges = [](const std::filesystem::path& p) {
        std::vector<std::pair<std::string, std::string>> out;
        std::istringstream in(slurp(p));
        for (std::string line; std::getline(in, line);) {
            const auto e = ExchangeCache::decode(line);
            out.emplace_back(e.key, e.response_text);
        }
        return out;
    };
    EXPECT_EQ(exchanges(tmp), exchanges(fixture("replay_cache.jsonl")));
    std::filesystem::remove(tmp);
}

TEST(Replay, UnknownPromptIsFatal) {
    auto config = load_config(fixture("replay_config.json"));
    config.seed = 4;  // different draws, different prompts
    EXPECT_THROW(run(config), ReplayMissError);
}

TEST(Compare, SharedSeedTable) {
    std::vector<SimConfig> configs{small(TaxSystem::free_market), small(TaxSystem::us_federal)};
    const auto table = compare(configs);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].social_outcome.size(), 24u);
    EXPECT_EQ(table.mean_social_outcome().size(), 2u);
    const auto csv = comparison_series_csv(table);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "month,free_7,us_federal_7");

    std::vector<SimConfig> single{small(TaxSystem::saez)};
    EXPECT_EQ(compare(single).rows.size(), 1u);

    configs[1].seed = 8;
    EXPECT_THROW(compare(configs), std::invalid_argument);
    configs[1] = small(TaxSystem::us_federal, 7, 12);
    EXPECT_THROW(compare(configs), std::invalid_argument);
}

TEST(Reports, MonthlyCsvLayout) {
    const auto r = run(small(TaxSystem::us_federal, 7, 3));
    const auto csv = monthly_csv(r);
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header,
              "month,price,inventory,interest_rate,rate_1,rate_2,rate_3,rate_4,rate_5,rate_6,"
              "rate_7,gini,equality,productivity,social_outcome");
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 14);
    EXPECT_EQ(row.substr(0, 13), "1,126.780000,");
}

TEST(Reports, WritesFiles) {
    auto c = small(TaxSystem::us_federal, 7, 12);
    c.write_household_rows = true;
    const auto dir = std::filesystem::temp_directory_path() / "taxsim_reports";
    std::filesystem::remove_all(dir);
    write_outputs(run(c), dir);
    for (const char* f : {"monthly.csv", "annual.csv", "households.csv", "summary.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(summary["tax_system"], "us_federal");
    EXPECT_EQ(slurp(dir / "annual.csv").substr(0, 28), "year,inflation,unemployment\n");
    std::filesystem::remove_all(dir);
}
