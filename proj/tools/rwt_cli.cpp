// SPDX-License-Identifier: Apache-2.0
//
// rwt: run, validate and list the reproducible tail experiments.
//
//   rwt run      --config exp.toml [--out DIR] [--seed N] [--quiet]
//   rwt validate --config exp.toml
//   rwt list
//
// Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 config error, 4 internal.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rwt/experiments.hpp"

namespace {

int do_validate(const std::string& config_path, bool quiet) {
    rwt::json doc;
    try {
        doc = rwt::parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 3;
    }
    std::vector<std::string> errors;
    const auto rc = rwt::validate_config(doc, errors);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
        return 3;
    }
    if (!quiet) {
        std::cout << "config ok: experiment '" << rc.experiment << "'\n"
                  << rc.doc.dump(2) << "\n";
    }
    return 0;
}

int do_run(const std::string& config_path, std::string out_dir,
           std::optional<std::uint64_t> seed_override, bool quiet) {
    rwt::json doc;
    try {
        doc = rwt::parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 3;
    }
    if (seed_override) doc["experiment"]["seed"] = *seed_override;
    std::vector<std::string> errors;
    auto rc = rwt::validate_config(doc, errors);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
        return 3;
    }
    if (out_dir.empty()) out_dir = rc.out_dir;
    if (out_dir.empty()) {
        if (const char* env = std::getenv("RWT_OUT")) out_dir = env;
    }
    if (out_dir.empty()) out_dir = "rwt-out";

    try {
        const auto report = rwt::run_experiment(rc, out_dir);
        if (!quiet) {
            std::cout << "experiment: " << report.experiment << "\n"
                      << "verdict:    " << rwt::to_string(report.verdict) << "\n"
                      << "wall:       " << report.wall_ms << " ms\n";
            for (const auto& t : report.tables) std::cout << "wrote " << t << "\n";
        }
        return static_cast<int>(report.verdict);
    } catch (const rwt::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

int do_list() {
    for (const auto& info : rwt::list_experiments()) {
        std::cout << info.name << "\n    exercises: " << info.result
                  << "\n    " << info.description << "\n";
    }
    std::cout << "total: " << rwt::list_experiments().size() << " experiments\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"randomly weighted heavy-tail experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "run an experiment from a config");
    run->add_option("--config", config_path, "config file (TOML-style or JSON)")
        ->required();
    run->add_option("--out", out_dir, "output directory (overrides config/env)");
    run->add_option("--seed", seed, "master seed override");
    run->add_flag("--quiet", quiet, "suppress progress output");

    auto* validate =
        app.add_subcommand("validate", "validate a config and echo defaults");
    validate->add_option("--config", config_path, "config file")->required();
    validate->add_flag("--quiet", quiet, "suppress the echo");

    app.add_subcommand("list", "list experiments and the results they exercise");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("run")) return do_run(config_path, out_dir, seed, quiet);
    if (app.got_subcommand("validate")) return do_validate(config_path, quiet);
    return do_list();
}
