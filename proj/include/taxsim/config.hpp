#pragma once

#include <filesystem>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "taxsim/simulation.hpp"

namespace taxsim {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// JSON object whose keys mirror SimConfig field names; nested groups are
/// objects (adjustment, saez, tax_agent, household_llm, gateway, initial).
/// Missing keys keep their defaults, unknown keys are rejected. Relative
/// paths are resolved against `base_dir`.
SimConfig config_from_json(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = {});

/// Reads, parses and validates a config file.
SimConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const SimConfig& config);

}  // namespace taxsim
