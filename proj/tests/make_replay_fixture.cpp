// Records the fixture cache used by the replay tests.
//
//   make_replay_fixture <config.json> <cache.jsonl>
//
// The config is run once with the fake model behind a recording gateway.

#include <filesystem>
#include <iostream>

#include "fake_llm.hpp"
#include "taxsim/config.hpp"
#include "taxsim/simulation.hpp"

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: make_replay_fixture <config.json> <cache.jsonl>\n";
        return 2;
    }
    try {
        auto config = taxsim::load_config(argv[1]);
        const std::filesystem::path cache = argv[2];
        std::filesystem::remove(cache);
        taxsim::ChatGateway gateway(taxsim::GatewayMode::record,
                                    std::make_unique<taxsim::ScriptedTransport>(fake_llm::reply),
                                    cache);
        const auto result = taxsim::run(config, &gateway);
        std::cout << "recorded " << result.summary.llm_requests << " exchanges to " << cache.string()
                  << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
