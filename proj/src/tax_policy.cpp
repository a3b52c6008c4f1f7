#include "taxsim/tax_policy.hpp"

#include <cctype>
#include <charconv>

#include "taxsim/format.hpp"

namespace taxsim {

TaxSystem parse_tax_system(std::string_view text) {
    if (text == "free" || text == "free_market") return TaxSystem::free_market;
    if (text == "us_federal") return TaxSystem::us_federal;
    if (text == "saez") return TaxSystem::saez;
    if (text == "tax_agent") return TaxSystem::tax_agent;
    throw std::invalid_argument("unknown tax system '" + std::string(text) + "'");
}

std::string_view to_string(TaxSystem system) {
    switch (system) {
        case TaxSystem::free_market: return "free";
        case TaxSystem::us_federal: return "us_federal";
        case TaxSystem::saez: return "saez";
        case TaxSystem::tax_agent: return "tax_agent";
    }
    return "unknown";
}

void TaxAgentConfig::validate() const {
    if (model_id.empty()) throw std::invalid_argument("tax_agent.model_id must be set");
    if (max_retries < 1) throw std::invalid_argument("tax_agent.max_retries must be >= 1");
    if (!(temperature >= 0.0)) throw std::invalid_argument("tax_agent.temperature must be >= 0");
}

// --- prompt ---------------------------------------------------------------

namespace {

/// "[ (a),  (b)]" as the planner sees its metric histories.
std::string parenthesised_history(std::span<const double> values) {
    if (values.empty()) return "[ (0.0)]";
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += " (" + short_decimal(values[i]) + ")";
    }
    return out + "]";
}

std::string schedule_history_text(std::span<const TaxSchedule> history) {
    std::string out = "[([";
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (i) out += ", ";
        out += short_decimal_list(history[i].rates());
    }
    return out + "])]";
}

}  // namespace

std::string build_tax_prompt(const PolicyObservation& obs, std::span<const double> thresholds) {
    std::string p;
    p += "You are a tax planner in charge of adjusting the tax rates of each income brackets. ";
    p += "You will decide the tax rate in next period applied cumulatively to the income of agents "
         "in the seven ";
    p += fixed_list(thresholds, 2);
    p += " income brackets. Last month, the incomes and wealth of individuals living in your "
         "society were $";
    p += short_decimal_list(obs.incomes);
    p += " and $";
    p += short_decimal_list(obs.wealth);
    p += ". The tax rates you set in the past months were ";
    p += schedule_history_text(obs.schedule_history);
    p += ". The average per-capita productivity in the last months were ";
    p += parenthesised_history(obs.productivity_history);
    p += ": the past months' equality performances were ";
    p += parenthesised_history(obs.equality_history);
    p += "(the higher, the more equal). Adjust the tax rates to build a society that you consider "
         "best for society. You have the total freedom to adjust the rates! Provide your decision "
         "in a JSON format. The decision should be a list with seven values (each value between 0 "
         "and 1 with intervals of 0.01). Please only provide me a list with seven values between 0 "
         "and 1! Do not provide anything else! Keep the thinking process to yourself.";
    return p;
}

// --- reply parsing ----------------------------------------------------------

namespace {

void skip_space(std::string_view text, std::size_t& pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
}

/// Numeric list starting at text[pos] == '['. Empty on any syntax error.
std::vector<double> numeric_list_at(std::string_view text, std::size_t pos) {
    std::vector<double> values;
    ++pos;
    while (true) {
        skip_space(text, pos);
        if (pos < text.size() && text[pos] == '+') ++pos;
        double value = 0.0;
        const auto [end, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (ec != std::errc{}) return {};
        values.push_back(value);
        pos = static_cast<std::size_t>(end - text.data());
        skip_space(text, pos);
        if (pos >= text.size()) return {};
        if (text[pos] == ']') return values;
        if (text[pos] != ',') return {};
        ++pos;
    }
}

}  // namespace

std::vector<double> parse_tax_reply(std::string_view reply) {
    for (std::size_t pos = reply.find('['); pos != std::string_view::npos;
         pos = reply.find('[', pos + 1)) {
        auto values = numeric_list_at(reply, pos);
        if (values.size() != kBracketCount) continue;
        for (double& v : values) v = snap_to_grid(v, 100);
        return values;
    }
    throw TaxReplyError("no list of " + std::to_string(kBracketCount) + " rates in reply");
}

// --- policies ---------------------------------------------------------------

const TaxSchedule& TaxPolicy::previous_schedule(const PolicyObservation& observation) {
    static const TaxSchedule bootstrap = TaxSchedule::us_federal();
    return observation.schedule_history.empty() ? bootstrap : observation.schedule_history.back();
}

SaezPolicy::SaezPolicy(SaezParams params) : params_(params) { params_.validate(); }

TaxSchedule SaezPolicy::propose(const PolicyObservation& observation) {
    const TaxSchedule& previous = previous_schedule(observation);
    try {
        return saez_schedule(observation.incomes, kBracketThresholds, params_,
                             previous.rates().back());
    } catch (const std::invalid_argument&) {
        ++fallbacks_;
        return previous;
    }
}

TaxAgentPolicy::TaxAgentPolicy(ChatGateway& gateway, TaxAgentConfig config)
    : gateway_(gateway), config_(std::move(config)) {
    config_.validate();
}

TaxSchedule TaxAgentPolicy::propose(const PolicyObservation& observation) {
    const ChatRequest request{config_.model_id, build_tax_prompt(observation, kBracketThresholds),
                              config_.temperature, config_.max_tokens};
    for (int attempt = 0; attempt < config_.max_retries; ++attempt) {
        try {
            return TaxSchedule::standard(parse_tax_reply(gateway_.complete(request)));
        } catch (const TaxReplyError&) {
        } catch (const TransportError&) {
        }
    }
    ++fallbacks_;
    return previous_schedule(observation);
}

std::unique_ptr<TaxPolicy> make_policy(TaxSystem system, const SaezParams& saez,
                                       const TaxAgentConfig& agent, ChatGateway* gateway) {
    switch (system) {
        case TaxSystem::free_market: return std::make_unique<FreeMarketPolicy>();
        case TaxSystem::us_federal: return std::make_unique<UsFederalPolicy>();
        case TaxSystem::saez: return std::make_unique<SaezPolicy>(saez);
        case TaxSystem::tax_agent:
            if (!gateway) throw std::invalid_argument("tax_agent policy needs an LLM gateway");
            return std::make_unique<TaxAgentPolicy>(*gateway, agent);
    }
    throw std::invalid_argument("unknown tax system");
}

}  // namespace taxsim
