#include "taxsim/households.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "taxsim/format.hpp"

namespace taxsim {

Trend trend(double now, double before) {
    if (now > before) return Trend::increased;
    if (now < before) return Trend::decreased;
    return Trend::unchanged;
}

std::string calendar_label(int start_year, std::size_t month) {
    const auto index = month == 0 ? 0 : month - 1;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%d.%02zu", start_year + static_cast<int>(index / 12),
                  index % 12 + 1);
    return buf;
}

void DecisionContext::validate() const {
    persona.validate();
    if (!(price > 0.0)) throw std::invalid_argument("decision context needs a positive price");
    if (expected_income < 0.0 || last_consumption < 0.0 || savings < 0.0 || interest_rate < 0.0) {
        throw std::invalid_argument("decision context has a negative amount");
    }
}

Decision quantize_decision(double work, double consumption) {
    return {snap_to_grid(work, 50), snap_to_grid(consumption, 50)};
}

namespace {

using nlohmann::json;

double numeric_field(const json& object, const char* key) {
    const auto it = object.find(key);
    if (it == object.end()) throw DecisionReplyError(std::string("reply has no '") + key + "' key");
    if (it->is_number()) return it->get<double>();
    if (it->is_string()) {
        try {
            return std::stod(it->get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw DecisionReplyError(std::string("'") + key + "' is not a number");
}

}  // namespace

Decision parse_decision_reply(std::string_view reply) {
    const auto open = reply.find('{');
    const auto close = reply.find('}', open == std::string_view::npos ? 0 : open);
    if (open == std::string_view::npos || close == std::string_view::npos) {
        throw DecisionReplyError("reply contains no JSON object");
    }
    std::string body(reply.substr(open, close - open + 1));
    json object = json::parse(body, nullptr, false);
    if (object.is_discarded()) {
        std::replace(body.begin(), body.end(), '\'', '"');
        object = json::parse(body, nullptr, false);
    }
    if (object.is_discarded() || !object.is_object()) {
        throw DecisionReplyError("reply object is not valid JSON");
    }
    return quantize_decision(numeric_field(object, "work"), numeric_field(object, "consumption"));
}

Decision rule_based_decide(const DecisionContext& c) {
    const double income = c.expected_income;
    const double average_rate = compute_tax(c.current_schedule, income) / std::max(income, 1.0);
    const double work = 0.2 + 0.8 * (1.0 - average_rate);
    const double disposable = c.savings + income * (1.0 - average_rate);
    const double consumption = std::min(0.95, 3.0 * c.price / std::max(disposable, c.price));
    return quantize_decision(work, consumption);
}

namespace {

std::string money(double value) { return "$" + fixed(value, 2); }

std::string percent_list(std::span<const double> rates) {
    std::string out = "[";
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (i) out += ", ";
        out += fixed(rates[i] * 100.0, 2) + "%";
    }
    return out + "]";
}

}  // namespace

std::string build_household_prompt(const DecisionContext& c) {
    const auto& persona = c.persona;
    std::string p;
    p += "You're " + persona.name + ", a " + std::to_string(persona.age) +
         "-year-old individual living in " + persona.city + ". ";
    p += "A tax planner adjusts your tax rates periodically. Now it's " + c.date + ". ";
    p += c.worked_last_month ? "Last month, you worked as a(an) " : "Last month, you did not work as a(an) ";
    p += persona.occupation + ". ";
    p += "If you continue working this month, your expected income will be " +
         money(c.expected_income) + ", ";
    switch (c.income_direction) {
        case Trend::decreased:
            p += "which decreased compared to last month due to deflation of the labor market. ";
            break;
        case Trend::increased:
            p += "which increased compared to last month due to inflation of the labor market. ";
            break;
        case Trend::unchanged: p += "which is the same as last month. "; break;
    }
    p += "Besides, your consumption was " + money(c.last_consumption) + ". ";
    if (c.last_tax_paid > 0.0) p += "Part of your income last month was witheld as income tax. ";

    p += "Last month, the tax brackets are: " + fixed_list(c.previous_schedule.thresholds(), 2) +
         " and their corresponding rates are: " + fixed_list(c.previous_schedule.rates(), 2) +
         ". Income earned within each bracket is taxed only at that bracket's rate. ";
    if (c.current_schedule.thresholds() == c.previous_schedule.thresholds()) {
        p += "This month, according to the tax planner, the brackets are not changed. "
             "But the planner updated corresponding rates: ";
    } else {
        p += "This month, according to the tax planner, the brackets are changed to " +
             fixed_list(c.current_schedule.thresholds(), 2) +
             ". The planner also updated corresponding rates: ";
    }
    p += percent_list(c.current_schedule.rates()) +
         ". Income earned within each bracket is taxed at that bracket's rate. "
         "Pay attention to the tax rates because they may be different from the previous ones "
         "and you need to make your decision based on the current rates ";
    switch (c.price_direction) {
        case Trend::decreased:
            p += "Deflation has led to a price decrease in the consumption market, with the "
                 "average price of essential goods now at ";
            break;
        case Trend::increased:
            p += "Inflation has led to a price increase in the consumption market, with the "
                 "average price of essential goods now at ";
            break;
        case Trend::unchanged:
            p += "In the consumption market, the average price of essential goods is now at ";
            break;
    }
    p += money(c.price) + ". ";
    p += "Your current savings account balance is " + money(c.savings) + ". ";
    p += "Interest rates, as set by your bank, stand at " + fixed(c.interest_rate * 100.0, 2) + "%. ";
    p += "Considering aspects like your living costs, future aspirations, broader economic trends, "
         "and the tax you need to pay, how is your willingness to work this month? How would you "
         "plan your expenditures on essential goods? Provide your decisions in a JSON format. The "
         "format should have two keys: 'work' (a value between 0 and 1 with intervals of 0.02, "
         "indicating the willingness or propensity to work) and 'consumption' (a value between 0 "
         "and 1 with intervals of 0.02, indicating the proportion of all your savings and income "
         "you intend to spend on essential goods). Keep in mind, only provide your decisions in a "
         "JSON format with two keys and two values. Do not contain any other content in your "
         "response. Keep the thinking process to yourself. I only need two key-value pairs.";
    if (!c.reflection_note.empty()) {
        p += " Your reflection on recent months: " + c.reflection_note;
    }
    return p;
}

std::string build_reflection_prompt(const Persona& persona, const MemoryPool& memory) {
    std::string p;
    p += "You're " + persona.name + ", a " + std::to_string(persona.age) +
         "-year-old individual living in " + persona.city + ", working as a(an) " +
         persona.occupation + ". Here is what happened to you in recent months:\n";
    p += memory.summary();
    p += "Reflect on your decisions about work and consumption in light of the labor market, the "
         "consumption market, the financial market and the tax you paid. In no more than 80 words, "
         "write the lessons you will keep in mind for future decisions. Respond with the note only.";
    return p;
}

HouseholdBackendKind parse_household_backend(std::string_view text) {
    if (text == "llm") return HouseholdBackendKind::llm;
    if (text == "rule_based") return HouseholdBackendKind::rule_based;
    throw std::invalid_argument("unknown household backend '" + std::string(text) + "'");
}

std::string_view to_string(HouseholdBackendKind kind) {
    return kind == HouseholdBackendKind::llm ? "llm" : "rule_based";
}

Decision RuleBasedBackend::decide(const DecisionContext& context) {
    return rule_based_decide(context);
}

std::string RuleBasedBackend::reflect(const Persona&, const MemoryPool& memory, const std::string&) {
    if (memory.empty()) return {};
    return std::string(kReflection);
}

void HouseholdLlmConfig::validate() const {
    if (model_id.empty()) throw std::invalid_argument("household model_id must be set");
    if (max_retries < 1) throw std::invalid_argument("household max_retries must be >= 1");
    if (!(temperature >= 0.0)) throw std::invalid_argument("household temperature must be >= 0");
}

LlmHouseholdBackend::LlmHouseholdBackend(ChatGateway& gateway, HouseholdLlmConfig config)
    : gateway_(gateway), config_(std::move(config)) {
    config_.validate();
}

Decision LlmHouseholdBackend::decide(const DecisionContext& context) {
    const ChatRequest request{config_.model_id, build_household_prompt(context),
                              config_.temperature, config_.max_tokens};
    for (int attempt = 0; attempt < config_.max_retries; ++attempt) {
        try {
            return parse_decision_reply(gateway_.complete(request));
        } catch (const DecisionReplyError&) {
        } catch (const TransportError&) {
        }
    }
    ++fallbacks_;
    return context.previous_decision.value_or(kDefaultDecision);
}

namespace {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(first, last - first + 1));
}

}  // namespace

std::string LlmHouseholdBackend::reflect(const Persona& persona, const MemoryPool& memory,
                                         const std::string& previous_note) {
    if (memory.empty()) return {};
    const ChatRequest request{config_.model_id, build_reflection_prompt(persona, memory),
                              config_.temperature, config_.max_tokens};
    try {
        std::string note = trim(gateway_.complete(request));
        if (!note.empty()) return note;
    } catch (const TransportError&) {
    }
    ++fallbacks_;
    return previous_note;
}

// --- persona roster ---------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    for (auto& f : fields) f = trim(f);
    return fields;
}

}  // namespace

std::vector<Persona> load_personas(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open persona roster " + path.string());

    std::vector<Persona> roster;
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto fields = split_csv_line(line);
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 4) throw std::runtime_error(where + ": expected 4 fields");
        Persona persona{fields[0], 0, fields[2], fields[3]};
        try {
            persona.age = std::stoi(fields[1]);
            persona.validate();
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
        roster.push_back(std::move(persona));
    }
    if (roster.empty()) throw std::runtime_error("persona roster " + path.string() + " is empty");
    return roster;
}

}  // namespace taxsim
