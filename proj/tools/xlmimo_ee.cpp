// SPDX-License-Identifier: Apache-2.0
//
// xlmimo-ee: energy-efficient antenna selection for XL-MIMO downlinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


// xlmimo_ee: runs energy-efficiency experiments for XL-MIMO antenna selection
// and writes averaged result rows as CSV or JSON.

#include <xlmimo/xlmimo.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::vector<int> parse_grid(const std::string& text)
{
    std::vector<int> grid;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw xlmimo::ConfigError("parse failure: --grid entry '" + item + "' is not an integer",
                                      xlmimo::ConfigError::Kind::parse_failure);
        grid.push_back(value);
    }
    if (grid.empty())
        throw xlmimo::ConfigError("parse failure: --grid is empty", xlmimo::ConfigError::Kind::parse_failure);
    return grid;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Energy-efficiency experiments for XL-MIMO antenna selection"};

    std::string config_path;
    std::optional<std::string> scenario, precoder, selector, ms, grid;
    std::optional<int> m, k, trials;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "csv";

    app.add_option("--config", config_path, "Flat JSON config file (snake_case keys, SI units)");
    app.add_option("--scenario", scenario, "sweep_k|sweep_ms|convergence|sweep_selectors|complexity|single");
    app.add_option("--precoder", precoder, "cb|zf|both");
    app.add_option("--selector", selector, "none|hrnp|ls|ga|pso|all");
    app.add_option("--m", m, "Number of BS antennas");
    app.add_option("--k", k, "Number of users");
    app.add_option("--ms", ms, "Active antennas, or 'auto' for the Newton optimum");
    app.add_option("--trials", trials, "User-drop trials per grid point");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--grid", grid, "Comma-separated K values (Ms values for sweep_ms)");
    app.add_option("--out", out_path, "Output path (stdout when omitted)");
    app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    xlmimo::ExperimentSpec spec;
    try {
        nlohmann::json overrides = nlohmann::json::object();
        if (scenario)
            overrides["scenario"] = *scenario;
        if (precoder)
            overrides["precoder"] = *precoder;
        if (selector)
            overrides["selector"] = *selector;
        if (m)
            overrides["m"] = *m;
        if (k)
            overrides["k"] = *k;
        if (trials)
            overrides["trials"] = *trials;
        if (seed)
            overrides["seed"] = *seed;
        if (grid)
            overrides["grid"] = parse_grid(*grid);
        if (ms) {
            if (*ms == "auto") {
                overrides["ms"] = "auto";
            } else {
                try {
                    std::size_t used = 0;
                    overrides["ms"] = std::stoi(*ms, &used);
                    if (used != ms->size())
                        throw std::invalid_argument(*ms);
                } catch (const std::exception&) {
                    throw xlmimo::ConfigError("parse failure: --ms expects an integer or 'auto'",
                                              xlmimo::ConfigError::Kind::parse_failure);
                }
            }
        }
        spec = config_path.empty() ? xlmimo::parse_config("", overrides) : xlmimo::load_config(config_path, overrides);
    } catch (const xlmimo::ConfigError& e) {
        std::cerr << "xlmimo_ee: config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const auto rows = xlmimo::run_experiment(spec);
        const auto fmt = xlmimo::parse_format(format);
        if (out_path.empty())
            xlmimo::write_results(rows, std::cout, fmt);
        else
            xlmimo::write_results(rows, out_path, fmt);
    } catch (const xlmimo::ConfigError& e) {
        std::cerr << "xlmimo_ee: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "xlmimo_ee: error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
