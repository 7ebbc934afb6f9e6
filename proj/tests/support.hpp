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


#ifndef XLMIMO_TESTS_SUPPORT_HPP
#define XLMIMO_TESTS_SUPPORT_HPP

#include <xlmimo/xlmimo.hpp>

#include <cmath>
#include <cstdint>

namespace xlmimo::test {

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline LongTermFadingMatrix constant_fading(int antennas, int users, double value = 1.0)
{
    LongTermFadingMatrix lt;
    lt.beta = Eigen::MatrixXd::Constant(antennas, users, value);
    lt.beta_avg = value;
    return lt;
}

inline LongTermFadingMatrix random_drop(const ScenarioConfig& cfg, std::uint64_t seed)
{
    return long_term_fading(ArrayGeometry::uniform(cfg), place_users(cfg, seed), cfg);
}

inline ScenarioConfig small_config(int antennas, int users)
{
    ScenarioConfig cfg;
    cfg.num_antennas = antennas;
    cfg.num_users = users;
    return cfg;
}

struct Enumerated {
    Mask best;
    double ee = 0.0;
};

inline Enumerated enumerate_all(const EeObjective& objective)
{
    const int m = objective.antennas();
    Enumerated out;
    for (unsigned bits = 0; bits < (1U << m); ++bits) {
        Mask mask(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i)
            mask[static_cast<std::size_t>(i)] = (bits >> i) & 1U;
        const double e = objective(mask);
        if (e > out.ee) {
            out.ee = e;
            out.best = mask;
        }
    }
    return out;
}

} // namespace xlmimo::test

#endif
