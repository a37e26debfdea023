#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "warcast/pipeline.hpp"

namespace {

std::string command_list() {
    std::string list;
    for (const auto name : warcast::kPipelineCommands) {
        if (!list.empty()) list += ", ";
        list += name;
    }
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"warcast: career-trajectory forecasting for baseball players"};
    app.get_formatter()->column_width(28);

    std::string command;
    std::string config_path, out_dir, cohort, years, policy;
    long long seed = 0;

    app.add_option("command", command, "one of: " + command_list())->required();
    auto* config_opt = app.add_option("--config", config_path, "config file (key=value lines)");
    auto* seed_opt = app.add_option("--seed", seed, "run seed (non-negative)");
    auto* out_opt = app.add_option("--out", out_dir, "output directory (default: reports)");
    auto* cohort_opt = app.add_option("--cohort", cohort, "batters, pitchers, or both");
    auto* years_opt = app.add_option("--years", years, "target seasons, e.g. 7..11 or 7,9,11");
    auto* policy_opt = app.add_option("--policy", policy, "missing-season policy: zero, -0.5, -1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    bool known = false;
    for (const auto name : warcast::kPipelineCommands) known |= (command == name);
    if (!known) {
        std::cerr << "unknown command '" << command << "'\n\n" << app.help();
        return 2;
    }

    try {
        warcast::RunConfig config =
            config_opt->count() ? warcast::load_run_config(config_path) : warcast::RunConfig{};
        if (seed_opt->count())
            warcast::apply_config_key(config, "seed", std::to_string(seed));
        if (out_opt->count()) config.out_dir = out_dir;
        if (cohort_opt->count()) warcast::apply_config_key(config, "cohort", cohort);
        if (years_opt->count()) warcast::apply_config_key(config, "years", years);
        if (policy_opt->count()) warcast::apply_config_key(config, "missing_policy", policy);
        return warcast::run_pipeline(std::move(config), command);
    } catch (const std::exception& e) {
        std::cerr << "warcast: " << e.what() << "\n";
        return 1;
    }
}
