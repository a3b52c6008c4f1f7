#include "taxsim/simulation.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <numeric>

#include "taxsim/http_transport.hpp"

#ifndef TAXSIM_DATA_DIR
#define TAXSIM_DATA_DIR "data"
#endif

namespace taxsim {

std::filesystem::path default_persona_roster() {
    return std::filesystem::path(TAXSIM_DATA_DIR) / "personas.csv";
}

void SimConfig::validate() const {
    if (n_households < 1) throw std::invalid_argument("n_households must be >= 1");
    if (months < 1) throw std::invalid_argument("months must be >= 1");
    if (!(productivity > 0.0)) throw std::invalid_argument("productivity must be > 0");
    if (adjust_period_months < 1 || adjust_period_months > 12) {
        throw std::invalid_argument("adjust_period_months must lie in [1, 12]");
    }
    if (reflection_period_months < 1) {
        throw std::invalid_argument("reflection_period_months must be >= 1");
    }
    if (memory_capacity < 1) throw std::invalid_argument("memory_capacity must be >= 1");
    if (max_concurrency < 1) throw std::invalid_argument("max_concurrency must be >= 1");
    if (!(initial.price > 0.0)) throw std::invalid_argument("initial.price must be > 0");
    if (!(initial.wage_median > 0.0) || !(initial.savings_median > 0.0)) {
        throw std::invalid_argument("initial medians must be > 0");
    }
    if (initial.wage_sigma < 0.0 || initial.savings_sigma < 0.0 || initial.inventory < 0.0) {
        throw std::invalid_argument("initial sigmas and inventory must be >= 0");
    }
    adjustment.validate();
    saez.validate();
    if (tax_system == TaxSystem::tax_agent) tax_agent.validate();
    if (household_backend == HouseholdBackendKind::llm) household_llm.validate();
    if (needs_gateway() && gateway.max_attempts < 1) {
        throw std::invalid_argument("gateway.max_attempts must be >= 1");
    }
}

std::unique_ptr<ChatGateway> make_gateway(const GatewayConfig& config) {
    switch (config.mode) {
        case GatewayMode::scripted: return ChatGateway::scripted(config.scripted_replies);
        case GatewayMode::replay: return ChatGateway::replay(config.cache_path);
        case GatewayMode::live:
        case GatewayMode::record: {
            const char* key = std::getenv(config.api_key_env.c_str());
            if (!key || !*key) {
                throw std::invalid_argument("environment variable " + config.api_key_env +
                                            " must hold the API key for " +
                                            std::string(to_string(config.mode)) + " mode");
            }
            auto transport = std::make_unique<HttpChatTransport>(
                HttpEndpoint{config.endpoint, key, std::chrono::seconds(config.timeout_seconds)});
            RetryPolicy retry{config.max_attempts, std::chrono::milliseconds(config.base_delay_ms),
                              config.backoff_factor};
            return std::make_unique<ChatGateway>(config.mode, std::move(transport),
                                                 config.cache_path, retry);
        }
    }
    throw std::invalid_argument("unknown gateway mode");
}

namespace {

class Simulation {
public:
    Simulation(const SimConfig& config, ChatGateway* gateway)
        : config_(config), rng_(config.seed) {
        config_.validate();
        if (config_.needs_gateway()) {
            if (!gateway) {
                owned_gateway_ = make_gateway(config_.gateway);
                gateway = owned_gateway_.get();
            }
            gateway_ = gateway;
            requests_at_start_ = gateway_->request_count();
        }
        if (config_.household_backend == HouseholdBackendKind::llm) {
            backend_ = std::make_unique<LlmHouseholdBackend>(*gateway_, config_.household_llm);
        } else {
            backend_ = std::make_unique<RuleBasedBackend>();
        }
        policy_ = make_policy(config_.tax_system, config_.saez, config_.tax_agent, gateway_);
    }

    SimulationResult run() {
        initialise();
        for (std::size_t m = 1; m <= config_.months; ++m) step(m);
        finish();
        return std::move(result_);
    }

private:
    void event(std::size_t month, const char* name) {
        if (config_.record_events) result_.events.push_back(std::to_string(month) + ":" + name);
    }

    void initialise() {
        const auto roster_path =
            config_.persona_roster.empty() ? default_persona_roster() : config_.persona_roster;
        const auto roster = load_personas(roster_path);

        households_.reserve(config_.n_households);
        for (std::size_t i = 0; i < config_.n_households; ++i) {
            HouseholdState h;
            h.id = i;
            h.persona = roster[i % roster.size()];
            h.memory = MemoryPool(config_.memory_capacity);
            h.hourly_wage = rng_.lognormal(config_.initial.wage_median, config_.initial.wage_sigma);
            h.previous_wage = h.hourly_wage;
            h.savings = rng_.lognormal(config_.initial.savings_median, config_.initial.savings_sigma);
            h.employed = true;  // month 1 prompts describe the previous month as worked
            households_.push_back(std::move(h));
        }

        market_.price = config_.initial.price;
        market_.inventory = config_.initial.inventory;
        market_.productivity = config_.productivity;
        market_.interest_rate = config_.adjustment.natural_rate + config_.adjustment.target_inflation;
        previous_price_ = market_.price;

        schedule_ = config_.tax_system == TaxSystem::free_market ? TaxSchedule::zero()
                                                                 : TaxSchedule::us_federal();
        last_month_schedule_ = schedule_;
        schedule_history_ = {schedule_};
        productivity_history_ = {0.0};
        equality_history_ = {0.0};
        last_incomes_.assign(config_.n_households, 0.0);

        result_.config = config_;
    }

    PolicyObservation observe(std::size_t month) const {
        PolicyObservation obs;
        obs.month = month;
        obs.incomes = last_incomes_;
        obs.wealth.reserve(households_.size());
        for (const auto& h : households_) obs.wealth.push_back(h.savings);
        obs.schedule_history = schedule_history_;
        obs.productivity_history = productivity_history_;
        obs.equality_history = equality_history_;
        return obs;
    }

    DecisionContext context_for(const HouseholdState& h, std::size_t month) const {
        DecisionContext c;
        c.date = calendar_label(config_.start_year, month);
        c.persona = h.persona;
        c.worked_last_month = h.employed;
        c.expected_income = kHoursPerMonth * h.hourly_wage;
        c.income_direction = trend(h.hourly_wage, h.previous_wage);
        c.last_consumption = h.consumption_spent;
        c.last_tax_paid = h.tax_paid;
        c.previous_schedule = last_month_schedule_;
        c.current_schedule = schedule_;
        c.price = market_.price;
        c.price_direction = trend(market_.price, previous_price_);
        c.savings = h.savings;
        c.interest_rate = market_.interest_rate;
        c.reflection_note = h.reflection_note;
        if (month > 1) c.previous_decision = h.decision;
        return c;
    }

    /// Calls fn(i) for every household, at most max_concurrency at a time.
    /// Results land by index so the outcome does not depend on scheduling.
    template <typename Fn>
    void for_each_household(Fn&& fn) {
        const std::size_t n = households_.size();
        const std::size_t width = gateway_ ? config_.max_concurrency : 1;
        if (width <= 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        for (std::size_t start = 0; start < n; start += width) {
            std::vector<std::future<void>> batch;
            for (std::size_t i = start; i < std::min(n, start + width); ++i) {
                batch.push_back(std::async(std::launch::async, [&fn, i] { fn(i); }));
            }
            for (auto& f : batch) f.get();
        }
    }

    void step(std::size_t m) {
        // (1) government resets rates at the start of each adjustment period
        if ((m - 1) % config_.adjust_period_months == 0) {
            event(m, "propose");
            TaxSchedule proposed = policy_->propose(observe(m - 1));
            if (proposed.thresholds() != schedule_.thresholds()) {
                throw std::logic_error("policy changed bracket thresholds");
            }
            schedule_ = std::move(proposed);
        }

        // (2) household decisions from start-of-month state
        event(m, "decide");
        std::vector<Decision> decisions(households_.size());
        for_each_household([&](std::size_t i) {
            decisions[i] = backend_->decide(context_for(households_[i], m));
        });
        for (std::size_t i = 0; i < households_.size(); ++i) households_[i].decision = decisions[i];

        // (3) labor realisation and production
        event(m, "produce");
        for (auto& h : households_) h.employed = rng_.bernoulli(h.decision.work);
        const double supply = produce(households_, market_);

        // (4) taxation and redistribution
        event(m, "tax");
        const auto taxation = apply_taxation(schedule_, households_);

        // (5) consumption against post-production inventory
        event(m, "consume");
        const double available = market_.inventory;
        const double traded_price = market_.price;
        const auto consumption = execute_consumption(households_, market_, rng_);

        // (6) wage and price adjustment
        event(m, "adjust");
        const double mismatch = compute_mismatch(consumption.intended_demand, available);
        for (auto& h : households_) h.previous_wage = h.hourly_wage;
        previous_price_ = market_.price;
        std::vector<double> paid_wages;
        paid_wages.reserve(households_.size());
        for (const auto& h : households_) paid_wages.push_back(h.hourly_wage);
        adjust_wages_and_price(households_, market_, mismatch, config_.adjustment, rng_);

        // (7) bookkeeping and metrics over wealth
        event(m, "record");
        std::vector<double> wealth;
        wealth.reserve(households_.size());
        for (const auto& h : households_) wealth.push_back(h.savings);

        MonthRecord rec;
        rec.month = m;
        rec.price = traded_price;
        rec.inventory = market_.inventory;
        rec.interest_rate = market_.interest_rate;
        rec.schedule = schedule_;
        rec.supply = supply;
        rec.demand = consumption.intended_demand;
        rec.mismatch = mismatch;
        rec.total_wealth = std::accumulate(wealth.begin(), wealth.end(), 0.0);
        rec.total_tax = std::accumulate(taxation.taxes.begin(), taxation.taxes.end(), 0.0);
        rec.metrics = snapshot(m, wealth, config_.productivity_mode);

        std::size_t workers = 0;
        std::vector<bool> labor;
        labor.reserve(households_.size());
        const std::string date = calendar_label(config_.start_year, m);
        for (std::size_t i = 0; i < households_.size(); ++i) {
            auto& h = households_[i];
            rec.total_pretax_income += h.pretax_income;
            workers += h.employed ? 1 : 0;
            labor.push_back(h.employed);
            result_.households.push_back({m, h.id, h.employed, paid_wages[i], h.pretax_income,
                                          h.tax_paid, h.posttax_income, h.consumption_spent,
                                          h.savings, h.decision});
            h.memory.push({date, h.decision, h.employed, h.pretax_income, h.tax_paid,
                           h.consumption_spent, h.savings, traded_price});
            last_incomes_[i] = h.pretax_income;
        }
        rec.employment_rate = static_cast<double>(workers) / static_cast<double>(households_.size());

        price_history_.push_back(traded_price);
        labor_year_.push_back(std::move(labor));
        schedule_history_.push_back(schedule_);
        productivity_history_.push_back(rec.metrics.productivity);
        equality_history_.push_back(rec.metrics.equality);
        last_month_schedule_ = schedule_;
        result_.months.push_back(std::move(rec));

        // (8) quarterly self-reflection
        if (m % config_.reflection_period_months == 0) {
            event(m, "reflect");
            std::vector<std::string> notes(households_.size());
            for_each_household([&](std::size_t i) {
                const auto& h = households_[i];
                notes[i] = backend_->reflect(h.persona, h.memory, h.reflection_note);
            });
            for (std::size_t i = 0; i < households_.size(); ++i) {
                households_[i].reflection_note = std::move(notes[i]);
            }
        }

        // (9) financial market at each year boundary
        if (m % 12 == 0) {
            event(m, "annual");
            AnnualRecord year;
            year.year = m / 12;
            year.inflation = annual_inflation(price_history_);
            year.unemployment = annual_unemployment(labor_year_);
            year.interest_rate =
                update_interest_rate(config_.adjustment, year.inflation, year.unemployment);
            market_.interest_rate = year.interest_rate;
            accrue_interest(households_, market_.interest_rate);
            labor_year_.clear();

            result_.months.back().metrics.inflation = year.inflation;
            result_.months.back().metrics.unemployment = year.unemployment;
            result_.years.push_back(year);
        }
    }

    void finish() {
        auto& s = result_.summary;
        const auto& last = result_.months.back().metrics;
        s.final_gini = last.gini;
        s.final_equality = last.equality;
        s.final_productivity = last.productivity;
        s.final_social_outcome = last.social_outcome;
        if (result_.years.size() > 1) {
            double sum = 0.0;
            for (std::size_t y = 1; y < result_.years.size(); ++y) sum += result_.years[y].inflation;
            s.mean_inflation = sum / static_cast<double>(result_.years.size() - 1);
        }
        if (!result_.years.empty()) {
            double sum = 0.0;
            for (const auto& y : result_.years) sum += y.unemployment;
            s.mean_unemployment = sum / static_cast<double>(result_.years.size());
        }
        s.policy_fallbacks = policy_->fallback_count();
        s.household_fallbacks = backend_->fallback_count();
        s.llm_requests = gateway_ ? gateway_->request_count() - requests_at_start_ : 0;
    }

    SimConfig config_;
    Rng rng_;
    std::unique_ptr<ChatGateway> owned_gateway_;
    ChatGateway* gateway_ = nullptr;
    std::size_t requests_at_start_ = 0;
    std::unique_ptr<HouseholdBackend> backend_;
    std::unique_ptr<TaxPolicy> policy_;

    std::vector<HouseholdState> households_;
    MarketState market_;
    double previous_price_ = 0.0;
    TaxSchedule schedule_ = TaxSchedule::zero();
    TaxSchedule last_month_schedule_ = TaxSchedule::zero();
    std::vector<TaxSchedule> schedule_history_;
    std::vector<double> productivity_history_;
    std::vector<double> equality_history_;
    std::vector<double> last_incomes_;
    std::vector<double> price_history_;
    std::vector<std::vector<bool>> labor_year_;

    SimulationResult result_;
};

}  // namespace

SimulationResult run(const SimConfig& config, ChatGateway* gateway) {
    return Simulation(config, gateway).run();
}

std::map<TaxSystem, double> ComparisonTable::mean_social_outcome() const {
    std::map<TaxSystem, std::pair<double, std::size_t>> acc;
    for (const auto& row : rows) {
        auto& [sum, count] = acc[row.system];
        sum += row.summary.final_social_outcome;
        ++count;
    }
    std::map<TaxSystem, double> out;
    for (const auto& [system, sc] : acc) out[system] = sc.first / static_cast<double>(sc.second);
    return out;
}

ComparisonTable compare(std::span<const SimConfig> configs) {
    if (configs.empty()) throw std::invalid_argument("compare needs at least one config");
    const auto& first = configs.front();
    for (const auto& c : configs) {
        if (c.n_households != first.n_households || c.months != first.months ||
            c.seed != first.seed) {
            throw std::invalid_argument("compared configs must share n_households, months and seed");
        }
    }
    ComparisonTable table;
    for (const auto& c : configs) {
        auto result = run(c);
        ComparisonRow row;
        row.system = c.tax_system;
        row.seed = c.seed;
        row.summary = result.summary;
        for (const auto& m : result.months) {
            row.social_outcome.push_back(m.metrics.social_outcome);
            row.gini.push_back(m.metrics.gini);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

ComparisonTable sweep(const SimConfig& base, std::span<const TaxSystem> systems,
                      std::span<const std::uint64_t> seeds) {
    ComparisonTable all;
    for (auto seed : seeds) {
        std::vector<SimConfig> configs;
        for (auto system : systems) {
            SimConfig c = base;
            c.seed = seed;
            c.tax_system = system;
            configs.push_back(std::move(c));
        }
        auto table = compare(configs);
        std::move(table.rows.begin(), table.rows.end(), std::back_inserter(all.rows));
    }
    return all;
}

}  // namespace taxsim
