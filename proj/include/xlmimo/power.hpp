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


#ifndef XLMIMO_POWER_HPP
#define XLMIMO_POWER_HPP

#include "error.hpp"
#include "geometry.hpp"
#include "precoding.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace xlmimo {

/// Circuit and processing constants of the consumption model. Defaults are the
/// reference deployment values; power densities are in W per bit/s.
struct PowerParams {
    double bandwidth = 20e6;               // B [Hz]
    double coherence_block = 200.0;        // S [symbols]
    std::optional<double> pilot_length;    // tau [symbols]; unset means tau = K
    double long_term_coherence = 2.0;      // T_lt [s]
    double computational_efficiency = 12.8e9; // L_bs [flop/W]
    double pa_efficiency_bs = 0.39;        // eta^d
    double pa_efficiency_mt = 0.50;        // eta^{u,T}
    double dl_fraction = 1.0;              // xi^d
    double ul_fraction = 0.0;              // xi^u
    double pilot_power = 0.02;             // rho_p [W]
    double p_fix = 18.0;
    double p_syn = 2.0;
    double p_bs = 1.0;                     // per active antenna
    double p_mt = 0.1;                     // per user terminal
    double p_cod = 0.10e-9;
    double p_dec = 0.80e-9;
    double p_bt = 0.25e-9;

    /// Pilot length; one pilot symbol per user when unset, capped at the coherence block.
    double tau(int users) const
    {
        return pilot_length.value_or(std::min(static_cast<double>(users), coherence_block));
    }

    void validate(int users) const
    {
        const double vals[] = {bandwidth, coherence_block, long_term_coherence, computational_efficiency,
                               pa_efficiency_bs, pa_efficiency_mt, dl_fraction, ul_fraction, pilot_power,
                               p_fix, p_syn, p_bs, p_mt, p_cod, p_dec, p_bt, tau(users)};
        for (double v : vals)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError("power parameters must be finite and non-negative");
        if (!(bandwidth > 0.0) || !(coherence_block > 0.0) || !(long_term_coherence > 0.0) ||
            !(computational_efficiency > 0.0) || !(pa_efficiency_bs > 0.0) || !(pa_efficiency_mt > 0.0))
            throw ConfigError("bandwidth, coherence times, computational efficiency and PA efficiencies must be positive");
        if (tau(users) > coherence_block)
            throw ConfigError("unit violation: pilot length tau (" + std::to_string(tau(users)) +
                              ") exceeds coherence block S (" + std::to_string(coherence_block) + ")",
                              ConfigError::Kind::unit_violation);
    }
};

enum class FlopKind { ts, prec_cb, prec_zf, ee, as_hrnp, as_ls, as_ga, as_pso };

/// Inputs to flop_cost; only the fields relevant to the requested kind are read.
struct FlopArgs {
    double active = 0.0;          // Ms
    int users = 0;                // K
    int antennas = 0;             // M
    double mean_iterations = 0.0; // realized or average iteration count
    int ga_population = 0;
    int pso_swarm = 0;
};

/// Operation counts, one flop per complex arithmetic operation. log is natural.
inline double flop_cost(FlopKind kind, const FlopArgs& a)
{
    const double ms = a.active;
    const double k = a.users;
    const double m = a.antennas;
    const auto ee = [&] { return 2.0 * m * k * k; };
    const auto hrnp = [&] { return 3.0 * m * k + (m > 0.0 ? m * std::log(m) : 0.0); };
    switch (kind) {
    case FlopKind::ts:
        return 2.0 * ms * k;
    case FlopKind::prec_cb:
        return 3.0 * ms * k;
    case FlopKind::prec_zf:
        return k * k * k / 3.0 + 3.0 * ms * k * k + ms * k;
    case FlopKind::ee:
        return ee();
    case FlopKind::as_hrnp:
        return hrnp();
    case FlopKind::as_ls:
        return hrnp() + a.mean_iterations * m * ee();
    case FlopKind::as_ga: {
        const double p = a.ga_population;
        return hrnp() + a.mean_iterations * (p * ee() + (p > 0.0 ? p * std::log(p) : 0.0));
    }
    case FlopKind::as_pso: {
        const double p = a.pso_swarm;
        return hrnp() + a.mean_iterations * (p * ee() + p);
    }
    }
    return 0.0;
}

struct FlopCost {
    double c_ts = 0.0;
    double c_prec = 0.0;
    double c_as = 0.0;
    double c_ee = 0.0;
};

/// Total consumed power and its eight components [W].
struct PowerBreakdown {
    double p_tx_dl = 0.0; // radiated DL power through the BS amplifiers
    double p_tx_tr = 0.0; // UL pilot transmission
    double p_ce = 0.0;    // channel estimation
    double p_cd = 0.0;    // coding/decoding
    double p_bh = 0.0;    // backhaul
    double p_pr = 0.0;    // linear processing + antenna selection
    double p_tc = 0.0;    // transceiver chains
    double p_fix = 0.0;
    double total = 0.0;
    double p_dagger = 0.0; // part independent of the active set
    FlopCost flops;
};

/// Consumption for `active` antennas carrying `sum_rate_bps`. The selection
/// cost c_as is charged once per long-term coherence interval, and only when
/// selector_active is set.
inline PowerBreakdown power_breakdown(const ScenarioConfig& cfg, const PowerParams& pp, double active,
                                      double sum_rate_bps, double c_as, bool selector_active,
                                      Precoder precoder = Precoder::zf)
{
    const int users = cfg.num_users;
    pp.validate(users);
    if (active < 0.0 || sum_rate_bps < 0.0)
        throw ConfigError("power_breakdown: active antennas and sum rate must be non-negative");
    const double k = users;
    const double tau = pp.tau(users);
    const double s = pp.coherence_block;
    const double lbs = pp.computational_efficiency;
    const double b = pp.bandwidth;

    PowerBreakdown out;
    FlopArgs args{.active = active, .users = users, .antennas = cfg.num_antennas};
    out.flops.c_ts = flop_cost(FlopKind::ts, args);
    out.flops.c_prec = flop_cost(precoder == Precoder::zf ? FlopKind::prec_zf : FlopKind::prec_cb, args);
    out.flops.c_ee = flop_cost(FlopKind::ee, args);
    out.flops.c_as = selector_active ? c_as : 0.0;

    out.p_tx_dl = pp.dl_fraction * cfg.transmit_power() / pp.pa_efficiency_bs;
    out.p_tx_tr = (tau / s) * k * pp.pilot_power / pp.pa_efficiency_mt;
    out.p_ce = (b / s) * 2.0 * tau * active * k / lbs;
    out.p_cd = (pp.p_cod + pp.p_dec) * sum_rate_bps;
    out.p_bh = pp.p_bt * sum_rate_bps;
    out.p_pr = b * (1.0 - tau / s) * out.flops.c_ts / lbs + (b / s) * out.flops.c_prec / lbs +
               out.flops.c_as / (pp.long_term_coherence * lbs);
    out.p_tc = pp.p_syn + active * pp.p_bs + k * pp.p_mt;
    out.p_fix = pp.p_fix;
    out.total = out.p_tx_dl + out.p_tx_tr + out.p_ce + out.p_cd + out.p_bh + out.p_pr + out.p_tc + out.p_fix;
    out.p_dagger = out.p_tx_dl + out.p_tx_tr + pp.p_syn + k * pp.p_mt + pp.p_fix;
    return out;
}

/// eta_e = B * sum_se / total power [bit/J].
inline double energy_efficiency(double sum_se_bpcu, double bandwidth, const PowerBreakdown& breakdown)
{
    if (!(breakdown.total > 0.0))
        throw InfeasibleError("energy_efficiency: total power must be positive");
    return bandwidth * sum_se_bpcu / breakdown.total;
}

} // namespace xlmimo

#endif
