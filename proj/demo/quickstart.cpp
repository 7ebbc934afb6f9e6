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


// Picks the active antenna count for a 500-antenna XL-MIMO array serving 100
// users, then compares HRNP against the three search heuristics on one drop.

#include <xlmimo/xlmimo.hpp>

#include <cstdio>

int main()
{
    using namespace xlmimo;

    ScenarioConfig cfg;
    PowerParams pp;
    HeuristicParams hp;

    const auto umep = build_umep(cfg, pp);
    const auto nr = optimal_ms_newton(umep);
    std::printf("Newton optimum: Ms* = %d after %d iterations (%d flops), analytic EE %.2f Mbit/J\n", nr.ms_star,
                nr.iterations, nr.flops, ee_analytic(nr.ms_star, umep) / 1e6);

    const auto lt = long_term_fading(ArrayGeometry::uniform(cfg), place_users(cfg, 2024), cfg);
    const EeObjective objective(lt, cfg, pp);

    const auto full = run_selector(Selector::none, objective, cfg.num_antennas, hp, 0);
    std::printf("%-5s |A| = %3d  EE = %6.2f Mbit/J\n", "all", full.active.size(), full.ee / 1e6);
    for (auto kind : {Selector::hrnp, Selector::ls, Selector::ga, Selector::pso}) {
        const auto r = run_selector(kind, objective, nr.ms_star, hp, 2024);
        std::printf("%-5s |A| = %3d  EE = %6.2f Mbit/J  iterations = %2d  C_as = %.3g flops\n",
                    std::string(to_string(kind)).c_str(), r.active.size(), r.ee / 1e6, r.iterations, r.flops_spent);
    }
    return 0;
}
