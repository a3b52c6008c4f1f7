#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "taxsim/economy.hpp"
#include "taxsim/llm_gateway.hpp"
#include "taxsim/memory.hpp"

namespace taxsim {

enum class Trend { increased, decreased, unchanged };

/// Direction of `now` relative to `before`.
Trend trend(double now, double before);

/// "YYYY.MM" for the given 1-based simulation month.
std::string calendar_label(int start_year, std::size_t month);

/// Everything a household sees when deciding for the coming month.
struct DecisionContext {
    std::string date;  // "YYYY.MM"
    Persona persona;
    bool worked_last_month = true;
    double expected_income = 0.0;  // 168 * hourly wage
    Trend income_direction = Trend::unchanged;
    double last_consumption = 0.0;
    double last_tax_paid = 0.0;
    TaxSchedule previous_schedule = TaxSchedule::us_federal();
    TaxSchedule current_schedule = TaxSchedule::us_federal();
    double price = 0.0;
    Trend price_direction = Trend::unchanged;
    double savings = 0.0;
    double interest_rate = 0.0;
    std::string reflection_note;
    std::optional<Decision> previous_decision;

    void validate() const;
};

/// Used when a household has no earlier decision to fall back on.
inline constexpr Decision kDefaultDecision{0.6, 0.4};

class DecisionReplyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Both values clamped to [0, 1] and snapped half-up to the 0.02 grid.
Decision quantize_decision(double work, double consumption);

/// Reads {"work": x, "consumption": y} out of a reply, tolerating text
/// around the object and single-quoted keys.
Decision parse_decision_reply(std::string_view reply);

/// Deterministic stand-in for the LLM household: work falls with the average
/// tax rate on expected income, consumption targets roughly three goods'
/// worth of disposable wealth.
Decision rule_based_decide(const DecisionContext& context);

std::string build_household_prompt(const DecisionContext& context);

std::string build_reflection_prompt(const Persona& persona, const MemoryPool& memory);

enum class HouseholdBackendKind { llm, rule_based };

HouseholdBackendKind parse_household_backend(std::string_view text);
std::string_view to_string(HouseholdBackendKind kind);

class HouseholdBackend {
public:
    virtual ~HouseholdBackend() = default;

    /// Always returns a grid-valid decision.
    virtual Decision decide(const DecisionContext& context) = 0;

    /// New reflection note; returns `previous_note` when no new note can be
    /// produced, and an empty note for an empty memory.
    virtual std::string reflect(const Persona& persona, const MemoryPool& memory,
                                const std::string& previous_note) = 0;

    [[nodiscard]] std::size_t fallback_count() const { return fallbacks_.load(); }

protected:
    std::atomic<std::size_t> fallbacks_{0};
};

class RuleBasedBackend final : public HouseholdBackend {
public:
    static constexpr std::string_view kReflection = "baseline reflection";

    Decision decide(const DecisionContext& context) override;
    std::string reflect(const Persona& persona, const MemoryPool& memory,
                        const std::string& previous_note) override;
};

struct HouseholdLlmConfig {
    std::string model_id = "qwen-turbo-2024-09-19";
    double temperature = 0.7;
    int max_tokens = 256;
    int max_retries = 3;

    void validate() const;
};

class LlmHouseholdBackend final : public HouseholdBackend {
public:
    LlmHouseholdBackend(ChatGateway& gateway, HouseholdLlmConfig config);

    Decision decide(const DecisionContext& context) override;
    std::string reflect(const Persona& persona, const MemoryPool& memory,
                        const std::string& previous_note) override;

private:
    ChatGateway& gateway_;
    HouseholdLlmConfig config_;
};

/// CSV with header "name,age,city,occupation"; fields may be double-quoted.
std::vector<Persona> load_personas(const std::filesystem::path& path);

}  // namespace taxsim
