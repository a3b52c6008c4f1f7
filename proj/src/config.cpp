#include "taxsim/config.hpp"

#include <fstream>
#include <set>

namespace taxsim {

using nlohmann::json;

namespace {

/// Reads fields from one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& doc, std::string name) : doc_(doc), name_(std::move(name)) {
        if (!doc_.is_object()) throw ConfigError(label() + " must be an object");
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, value] : doc_.items()) {
            if (!seen_.contains(key)) throw ConfigError("unknown config key " + label() + key);
        }
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        const auto it = doc_.find(key);
        if (it == doc_.end()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError("config key " + label() + key + ": " + e.what());
        }
    }

    template <typename Enum, typename Parse>
    void read_enum(const char* key, Enum& out, Parse parse) {
        std::string text;
        read(key, text);
        if (text.empty()) return;
        try {
            out = parse(text);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config key " + label() + key + ": " + e.what());
        }
    }

    void read_path(const char* key, std::filesystem::path& out,
                   const std::filesystem::path& base_dir) {
        std::string text;
        read(key, text);
        if (text.empty()) return;
        std::filesystem::path p(text);
        out = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }

    const json* child(const char* key) {
        seen_.insert(key);
        const auto it = doc_.find(key);
        return it == doc_.end() ? nullptr : &*it;
    }

    [[nodiscard]] std::string label() const { return name_.empty() ? "" : name_ + "."; }

private:
    const json& doc_;
    std::string name_;
    std::set<std::string> seen_;
};

}  // namespace

SimConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    SimConfig c;
    {
        Section top(doc, "");
        top.read("n_households", c.n_households);
        top.read("months", c.months);
        top.read("productivity", c.productivity);
        top.read("seed", c.seed);
        top.read_enum("tax_system", c.tax_system, parse_tax_system);
        top.read_enum("household_backend", c.household_backend, parse_household_backend);
        top.read("adjust_period_months", c.adjust_period_months);
        top.read("reflection_period_months", c.reflection_period_months);
        top.read("memory_capacity", c.memory_capacity);
        top.read("start_year", c.start_year);
        top.read_enum("productivity_mode", c.productivity_mode, [](const std::string& s) {
            if (s == "per_capita") return ProductivityMode::per_capita;
            if (s == "total") return ProductivityMode::total;
            throw std::invalid_argument("expected per_capita or total");
        });
        top.read_path("persona_roster", c.persona_roster, base_dir);
        top.read_path("output_dir", c.output_dir, base_dir);
        top.read("write_household_rows", c.write_household_rows);
        top.read("max_concurrency", c.max_concurrency);
        top.read("record_events", c.record_events);

        if (const json* j = top.child("adjustment")) {
            Section s(*j, "adjustment");
            auto& a = c.adjustment;
            s.read("wage_adjust_max", a.wage_adjust_max);
            s.read("price_adjust_max", a.price_adjust_max);
            s.read("natural_rate", a.natural_rate);
            s.read("target_inflation", a.target_inflation);
            s.read("inflation_coefficient", a.inflation_coefficient);
            s.read("unemployment_coefficient", a.unemployment_coefficient);
            s.read("natural_unemployment", a.natural_unemployment);
        }
        if (const json* j = top.child("saez")) {
            Section s(*j, "saez");
            s.read("elasticity", c.saez.elasticity);
            s.read("density_bandwidth", c.saez.density_bandwidth);
            s.read("tail_threshold", c.saez.tail_threshold);
            s.read_enum("density", c.saez.density, [](const std::string& v) {
                if (v == "histogram") return DensityEstimator::histogram;
                if (v == "gaussian_kernel") return DensityEstimator::gaussian_kernel;
                throw std::invalid_argument("expected histogram or gaussian_kernel");
            });
        }
        if (const json* j = top.child("tax_agent")) {
            Section s(*j, "tax_agent");
            s.read("model_id", c.tax_agent.model_id);
            s.read("temperature", c.tax_agent.temperature);
            s.read("max_tokens", c.tax_agent.max_tokens);
            s.read("max_retries", c.tax_agent.max_retries);
        }
        if (const json* j = top.child("household_llm")) {
            Section s(*j, "household_llm");
            s.read("model_id", c.household_llm.model_id);
            s.read("temperature", c.household_llm.temperature);
            s.read("max_tokens", c.household_llm.max_tokens);
            s.read("max_retries", c.household_llm.max_retries);
        }
        if (const json* j = top.child("gateway")) {
            Section s(*j, "gateway");
            auto& g = c.gateway;
            s.read_enum("mode", g.mode, parse_gateway_mode);
            s.read("endpoint", g.endpoint);
            s.read("api_key_env", g.api_key_env);
            s.read_path("cache_path", g.cache_path, base_dir);
            s.read("scripted_replies", g.scripted_replies);
            s.read("max_attempts", g.max_attempts);
            s.read("base_delay_ms", g.base_delay_ms);
            s.read("backoff_factor", g.backoff_factor);
            s.read("timeout_seconds", g.timeout_seconds);
        }
        if (const json* j = top.child("initial")) {
            Section s(*j, "initial");
            auto& i = c.initial;
            s.read("wage_median", i.wage_median);
            s.read("wage_sigma", i.wage_sigma);
            s.read("savings_median", i.savings_median);
            s.read("savings_sigma", i.savings_sigma);
            s.read("price", i.price);
            s.read("inventory", i.inventory);
        }
    }
    return c;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    SimConfig config = config_from_json(doc, path.parent_path());
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config;
}

json config_to_json(const SimConfig& c) {
    const auto& a = c.adjustment;
    const auto& g = c.gateway;
    const auto& i = c.initial;
    return {
        {"n_households", c.n_households},
        {"months", c.months},
        {"productivity", c.productivity},
        {"seed", c.seed},
        {"tax_system", to_string(c.tax_system)},
        {"household_backend", to_string(c.household_backend)},
        {"adjust_period_months", c.adjust_period_months},
        {"reflection_period_months", c.reflection_period_months},
        {"memory_capacity", c.memory_capacity},
        {"start_year", c.start_year},
        {"productivity_mode",
         c.productivity_mode == ProductivityMode::per_capita ? "per_capita" : "total"},
        {"persona_roster", c.persona_roster.string()},
        {"output_dir", c.output_dir.string()},
        {"write_household_rows", c.write_household_rows},
        {"max_concurrency", c.max_concurrency},
        {"record_events", c.record_events},
        {"adjustment",
         {{"wage_adjust_max", a.wage_adjust_max},
          {"price_adjust_max", a.price_adjust_max},
          {"natural_rate", a.natural_rate},
          {"target_inflation", a.target_inflation},
          {"inflation_coefficient", a.inflation_coefficient},
          {"unemployment_coefficient", a.unemployment_coefficient},
          {"natural_unemployment", a.natural_unemployment}}},
        {"saez",
         {{"elasticity", c.saez.elasticity},
          {"density_bandwidth", c.saez.density_bandwidth},
          {"tail_threshold", c.saez.tail_threshold},
          {"density",
           c.saez.density == DensityEstimator::histogram ? "histogram" : "gaussian_kernel"}}},
        {"tax_agent",
         {{"model_id", c.tax_agent.model_id},
          {"temperature", c.tax_agent.temperature},
          {"max_tokens", c.tax_agent.max_tokens},
          {"max_retries", c.tax_agent.max_retries}}},
        {"household_llm",
         {{"model_id", c.household_llm.model_id},
          {"temperature", c.household_llm.temperature},
          {"max_tokens", c.household_llm.max_tokens},
          {"max_retries", c.household_llm.max_retries}}},
        {"gateway",
         {{"mode", to_string(g.mode)},
          {"endpoint", g.endpoint},
          {"api_key_env", g.api_key_env},
          {"cache_path", g.cache_path.string()},
          {"scripted_replies", g.scripted_replies},
          {"max_attempts", g.max_attempts},
          {"base_delay_ms", g.base_delay_ms},
          {"backoff_factor", g.backoff_factor},
          {"timeout_seconds", g.timeout_seconds}}},
        {"initial",
         {{"wage_median", i.wage_median},
          {"wage_sigma", i.wage_sigma},
          {"savings_median", i.savings_median},
          {"savings_sigma", i.savings_sigma},
          {"price", i.price},
          {"inventory", i.inventory}}},
    };
}

}  // namespace taxsim
