#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "barriers/commands.hpp"
#include "barriers/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"barriers: news-spreading barrier annotation and classification pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 0;
    app.add_option("--config", config_path, "key=value config file");
    const auto* seed_opt = app.add_option("--seed", seed, "run seed (overrides config)");
    const auto* jobs_opt = app.add_option("--jobs", jobs, "parallel grid workers (overrides config)");
    const auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides config)");

    auto* validate = app.add_subcommand("validate", "load corpus and metadata, report coverage");
    auto* annotate = app.add_subcommand("annotate", "label every event for the five barriers");
    auto* train_eval =
        app.add_subcommand("train-eval", "train classifiers over the grid and write reports");
    auto* stats = app.add_subcommand("stats", "descriptive statistics and charts");
    std::string groups;
    const auto* groups_opt =
        stats->add_option("--groups", groups, "concept overlap grouping: barriers|categories");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : barriers::kExitConfig;
    }

    try {
        barriers::RunConfig config = barriers::default_run_config();
        if (!config_path.empty()) {
            config = barriers::load_config_file(config_path, std::move(config));
        }
        // Flags win over the config file.
        if (seed_opt->count() > 0) {
            config.seed = seed;
        }
        if (jobs_opt->count() > 0) {
            barriers::apply_config_entry(config, "jobs", std::to_string(jobs));
        }
        if (out_opt->count() > 0) {
            config.out_dir = out_dir;
        }
        if (groups_opt->count() > 0) {
            barriers::apply_config_entry(config, "stats_groups", groups);
        }

        if (validate->parsed()) {
            return barriers::run_command(barriers::cmd_validate, config);
        }
        if (annotate->parsed()) {
            return barriers::run_command(barriers::cmd_annotate, config);
        }
        if (train_eval->parsed()) {
            return barriers::run_command(barriers::cmd_train_eval, config);
        }
        if (stats->parsed()) {
            return barriers::run_command(barriers::cmd_stats, config);
        }
    } catch (const barriers::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return barriers::kExitConfig;
    } catch (const barriers::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return barriers::kExitIo;
    }
    return barriers::kExitConfig;
}
