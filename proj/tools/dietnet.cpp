/*
   Copyright 2026 The dietnet Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// dietnet: runs simulation scenarios and reports on them.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dietnet/errors.hpp"
#include "dietnet/scenario.hpp"

#ifndef DIETNET_SCENARIO_DIR
#define DIETNET_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

// A bare name like "honest_chain" resolves against the scenario directory.
fs::path resolve(const std::string& arg, const fs::path& dir) {
    fs::path p(arg);
    if (fs::exists(p)) return p;
    auto named = dir / (arg + ".json");
    if (fs::exists(named)) return named;
    return p;
}

bool write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    out << data;
    return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dietnet: sharded-UTXO chain simulator"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
    std::string report_path;
    std::string out_path;
    std::string dir = DIETNET_SCENARIO_DIR;

    auto* run = app.add_subcommand("run", "Run a scenario and check its expectations");
    run->add_option("config", config, "Scenario file or bundled scenario name")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--report", report_path, "Write the JSON report here");
    run->add_flag("--verbose,-v", verbose, "Print every verdict");

    auto* trace = app.add_subcommand("trace", "Run a scenario and write its event trace");
    trace->add_option("config", config, "Scenario file or bundled scenario name")->required();
    trace->add_option("--out", out_path, "Trace file (one JSON object per line)")->required();
    trace->add_option("--seed", seed, "Override the scenario seed");
    trace->add_option("--report", report_path, "Write the JSON report here");
    trace->add_flag("--verbose,-v", verbose, "Print every verdict");

    auto* list = app.add_subcommand("list-scenarios", "List the bundled scenarios");
    for (auto* sub : {run, trace, list}) sub->add_option("--dir", dir, "Scenario directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& s : dietnet::list_scenarios(dir)) {
                std::cout << s.path.stem().string() << "\t" << s.description << "\n";
            }
            return kExitPass;
        }
        auto path = resolve(config, dir);
        auto report = dietnet::run_scenario(dietnet::load_scenario_file(path), dietnet::ScenarioOptions{seed});
        std::cout << report.text(verbose);
        if (!report_path.empty() && !write_file(report_path, report.json.dump(2) + "\n")) {
            std::cerr << "error: cannot write " << report_path << "\n";
            return kExitFailed;
        }
        if (trace->parsed() && !write_file(out_path, report.trace)) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return kExitFailed;
        }
        return report.passed() ? kExitPass : kExitFailed;
    } catch (const dietnet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailed;
    }
}
