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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dietnet {

struct ScenarioOptions {
    //! Replaces the config's seed.
    std::optional<std::uint64_t> seed;
};

struct ExpectationResult {
    std::size_t index{0};
    std::string type;
    bool passed{false};
    std::string detail;
};

struct ScenarioReport {
    std::string name;
    std::uint64_t seed{0};
    std::vector<ExpectationResult> expectations;
    //! Machine-readable report; keys are sorted so equal runs dump to equal bytes.
    nlohmann::json json;
    //! The network trace, one JSON object per line.
    std::string trace;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] std::string text(bool verbose = false) const;
};

//! Parses a scenario file. Throws ConfigError naming the file on unreadable or malformed input.
[[nodiscard]] nlohmann::json load_scenario_file(const std::filesystem::path& path);

/**
 * Builds the topology, runs the script and checks the config's expectations.
 * Config mistakes (missing fields, unknown nodes or keys, unspendable amounts, an adversary
 * mining past its budget) throw ConfigError with the field path. Expectations that do not hold
 * are reported, not thrown.
 */
[[nodiscard]] ScenarioReport run_scenario(const nlohmann::json& config, const ScenarioOptions& options = {});

struct ScenarioInfo {
    std::filesystem::path path;
    std::string name;
    std::string description;
};

//! The *.json scenarios in a directory, sorted by file name.
[[nodiscard]] std::vector<ScenarioInfo> list_scenarios(const std::filesystem::path& dir);

}  // namespace dietnet
