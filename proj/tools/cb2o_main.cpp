#include "cb2o/cli/config.hpp"
#include "cb2o/cli/runner.hpp"

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cb2o::cli;

int main(int argc, char** argv)
{
    spdlog::set_pattern("[%l] %v");
    spdlog::cfg::load_env_levels();  // SPDLOG_LEVEL=debug|info|warn|error|off

    CLI::App app{"Consensus-based bi-level optimization and clustered federated learning experiments"};
    std::string mode, config_path, out;
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
    bool list_keys = false, dump = false;
    app.add_option("mode", mode, "cb2o | fed | sweep | oracle");
    app.add_option("--config", config_path, "key = value config file; defaults apply when omitted")
        ->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "overrides the seed key");
    app.add_option("--out", out, "overrides the out key");
    app.add_option("--set", overrides, "key=value override, repeatable")->take_all();
    app.add_flag("--list-keys", list_keys, "print every config key with its default and exit");
    app.add_flag("--dump-config", dump, "print the resolved config and exit");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    }

    if (list_keys) {
        for (const auto& k : config_keys()) std::cout << k.key << " = " << k.default_value << "    # " << k.doc << "\n";
        return exit_ok;
    }

    ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            std::stringstream text;
            text << in.rdbuf();
            cfg = parse_config(text.str());
        }
        if (!mode.empty()) cfg.mode = parse_mode(mode);
        if (*seed_opt) cfg.seed = seed;
        if (!out.empty()) cfg.out = out;
        for (const auto& o : overrides) apply_override(cfg, o);
        validate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    if (dump) {
        std::cout << serialize_config(cfg);
        return exit_ok;
    }
    return run(cfg, std::cout);
}
