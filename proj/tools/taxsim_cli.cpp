#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taxsim/config.hpp"
#include "taxsim/report.hpp"
#include "taxsim/simulation.hpp"

namespace {

using namespace taxsim;

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> system;
    std::optional<std::size_t> months;
    std::optional<std::string> out;
};

void apply_overrides(SimConfig& config, const RunOptions& o) {
    if (o.seed) config.seed = *o.seed;
    if (o.system) config.tax_system = parse_tax_system(*o.system);
    if (o.months) config.months = *o.months;
    if (o.out) config.output_dir = *o.out;
    config.validate();
}

void print_summary(const SimulationResult& result, const std::filesystem::path& dir) {
    const auto& s = result.summary;
    std::cout << to_string(result.config.tax_system) << " seed=" << result.config.seed
              << " months=" << result.months.size() << " gini=" << s.final_gini
              << " equality=" << s.final_equality << " productivity=" << s.final_productivity
              << " social_outcome=" << s.final_social_outcome << "\n"
              << "outputs written to " << dir.string() << "\n";
}

int cmd_run(const RunOptions& o) {
    SimConfig config = load_config(o.config);
    apply_overrides(config, o);
    const auto result = run(config);
    write_outputs(result, config.output_dir);
    print_summary(result, config.output_dir);
    return 0;
}

int cmd_replay(const RunOptions& o, const std::string& cache) {
    SimConfig config = load_config(o.config);
    config.gateway.mode = GatewayMode::replay;
    config.gateway.cache_path = cache;
    apply_overrides(config, o);
    const auto result = run(config);
    write_outputs(result, config.output_dir);
    print_summary(result, config.output_dir);
    return 0;
}

int cmd_compare(const std::string& path, const std::vector<std::string>& systems,
                const std::vector<std::uint64_t>& seeds, const std::optional<std::string>& out) {
    SimConfig base = load_config(path);
    if (out) base.output_dir = *out;
    std::vector<TaxSystem> parsed;
    for (const auto& s : systems) parsed.push_back(parse_tax_system(s));
    const auto table = sweep(base, parsed, seeds);
    write_comparison(table, base.output_dir);
    std::cout << comparison_csv(table);
    for (const auto& [system, mean] : table.mean_social_outcome()) {
        std::cout << "mean social outcome " << to_string(system) << ": " << mean << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bracketed income tax economy simulator"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Run one simulation");
    run_cmd->add_option("--config", run_opts.config, "Config file (JSON)")->required();
    run_cmd->add_option("--seed", run_opts.seed, "Random seed");
    run_cmd->add_option("--system", run_opts.system, "free|us_federal|saez|tax_agent");
    run_cmd->add_option("--months", run_opts.months, "Number of months");
    run_cmd->add_option("--out", run_opts.out, "Output directory");

    std::string compare_config;
    std::vector<std::string> systems;
    std::vector<std::uint64_t> seeds;
    std::optional<std::string> compare_out;
    auto* compare_cmd = app.add_subcommand("compare", "Run several tax systems on shared seeds");
    compare_cmd->add_option("--config", compare_config, "Config file (JSON)")->required();
    compare_cmd->add_option("--systems", systems, "Comma-separated tax systems")
        ->required()
        ->delimiter(',');
    compare_cmd->add_option("--seeds", seeds, "Comma-separated seeds")->required()->delimiter(',');
    compare_cmd->add_option("--out", compare_out, "Output directory");

    RunOptions replay_opts;
    std::string cache;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run offline from a recorded cache");
    replay_cmd->add_option("--config", replay_opts.config, "Config file (JSON)")->required();
    replay_cmd->add_option("--cache", cache, "Recorded exchange cache (JSONL)")->required();
    replay_cmd->add_option("--seed", replay_opts.seed, "Random seed");
    replay_cmd->add_option("--out", replay_opts.out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(run_opts);
        if (*compare_cmd) return cmd_compare(compare_config, systems, seeds, compare_out);
        if (*replay_cmd) return cmd_replay(replay_opts, cache);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
