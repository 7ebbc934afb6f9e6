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


// Acceptance checks. Run with no arguments for all criteria, or pass criterion
// numbers to run a subset. Prints one PASS/FAIL line per criterion and exits
// non-zero when any selected criterion fails.

#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

namespace {

using namespace xlmimo;
using test::rel;

// Pinned tolerances.
constexpr int kMsStarTarget = 146;
constexpr int kMsStarSlack = 2;
constexpr int kMaxNewtonIterations = 3;
constexpr double kEeAtOptimum = 34.85e6;
constexpr double kEeFullArray = 18.71e6;
constexpr double kEeTolerance = 0.10;
constexpr double kEeRatio = 1.863;
constexpr double kEeRatioTolerance = 0.05;
constexpr int kValidityBoundary = 224;
constexpr double kDetSinrTolerance = 0.05;
constexpr double kClosedFormTolerance = 1e-12;
constexpr double kApproxGapTolerance = 0.05;
constexpr double kDerivativeTolerance = 1e-5;
constexpr double kActiveAntennaTolerance = 0.15;
constexpr double kComplexityOrder = 5.0;
constexpr double kComplexityOrderSlack = 1.0;

constexpr double kLimitNewton = 1.0;      // [s]
constexpr double kLimitSweep = 120.0;
constexpr double kLimitMonteCarlo = 300.0;
constexpr double kLimitHeuristics = 600.0;
constexpr double kLimitActive = 900.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

UmepModel reference_umep(int users = 100)
{
    ScenarioConfig cfg;
    cfg.num_users = users;
    return build_umep(cfg, PowerParams{});
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome optimal_antenna_count()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto u = reference_umep();
    const auto r = optimal_ms_newton(u);
    int grid = u.users;
    for (int ms = u.users; ms <= validity_boundary(u); ++ms)
        if (ee_analytic(ms, u) > ee_analytic(grid, u))
            grid = ms;
    const double t = seconds_since(t0);
    const bool pass = std::abs(r.ms_star - kMsStarTarget) <= kMsStarSlack && grid == r.ms_star && t < kLimitNewton;
    return {pass, fmt("Ms*=%d (target %d+-%d), grid argmax=%d, %.3f s", r.ms_star, kMsStarTarget, kMsStarSlack,
                      grid, t)};
}

Outcome newton_convergence()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto u = reference_umep();
    const auto r = optimal_ms_newton(u, 1.5 * u.users);
    const double t = seconds_since(t0);
    const bool pass = r.iterations <= kMaxNewtonIterations && !r.used_bisection && t < kLimitNewton;
    return {pass, fmt("%d iterations from 150 (limit %d), %d flops, %.3f s", r.iterations, kMaxNewtonIterations,
                      r.flops, t)};
}

Outcome operating_points()
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentSpec spec;
    spec.scenario = Scenario::sweep_ms;
    spec.selector = SelectorChoice::hrnp;
    spec.grid = {kMsStarTarget, 500};
    spec.trials = 1000;
    const auto rows = run_experiment(spec);
    const double at_opt = rows[0].ee_bits_per_joule;
    const double full = rows[1].ee_bits_per_joule;
    const double t = seconds_since(t0);
    const bool pass = rel(at_opt, kEeAtOptimum) <= kEeTolerance && rel(full, kEeFullArray) <= kEeTolerance &&
                      rel(at_opt / full, kEeRatio) <= kEeRatioTolerance && t < kLimitSweep;
    return {pass, fmt("EE(146)=%.2f Mbit/J, EE(500)=%.2f Mbit/J, ratio %.3f (target 1.863), %.1f s", at_opt / 1e6,
                      full / 1e6, at_opt / full, t)};
}

Outcome validity()
{
    const int b = validity_boundary(reference_umep(), 0.25);
    return {b == kValidityBoundary, fmt("boundary=%d (target %d)", b, kValidityBoundary)};
}

Outcome precoder_ordering()
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentSpec spec;
    spec.scenario = Scenario::sweep_k;
    spec.precoder = PrecoderChoice::both;
    spec.selector = SelectorChoice::none;
    spec.config.num_antennas = 512;
    spec.grid = {8, 16, 32, 64, 128, 256};
    const auto rows = run_experiment(spec);
    bool ordered = true;
    double worst = 1e300;
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
        const double margin = rows[i + 1].ee_bits_per_joule / rows[i].ee_bits_per_joule;
        ordered = ordered && rows[i].precoder == "cb" && rows[i + 1].precoder == "zf" && margin >= 1.0;
        worst = std::min(worst, margin);
    }
    const double t = seconds_since(t0);
    return {ordered && t < kLimitSweep,
            fmt("%zu K values, min EE_zf/EE_cb=%.3f, %.1f s", rows.size() / 2, worst, t)};
}

Outcome det_fidelity()
{
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig cfg;
    cfg.num_antennas = 512;
    cfg.num_users = 64;
    const auto lt = test::random_drop(cfg, derive_seed(1, Stream::trial, {0}));
    const double p = cfg.transmit_power();
    const auto full = ActiveSet::full(512);
    constexpr int draws = 1000;
    std::vector<double> mc_cb(64, 0.0), mc_zf(64, 0.0);
    for (int d = 0; d < draws; ++d) {
        const auto h = draw_channel(lt, derive_seed(1, Stream::fading, {static_cast<std::uint64_t>(d)})).h;
        const auto cb = instantaneous_sinr(h, precode(Precoder::cb, h, p), cfg.noise_power);
        const auto zf = instantaneous_sinr(h, precode(Precoder::zf, h, p), cfg.noise_power);
        for (int k = 0; k < 64; ++k) {
            mc_cb[k] += cb.sinr[k] / draws;
            mc_zf[k] += zf.sinr[k] / draws;
        }
    }
    const auto gap = [&](Precoder kind, const std::vector<double>& mc) {
        const auto det = det_sinr(kind, lt, full, p, cfg.noise_power);
        double g = 0.0;
        for (int k = 0; k < 64; ++k)
            g += rel(mc[k], det.sinr[k]) / 64.0;
        return g;
    };
    const double g_cb = gap(Precoder::cb, mc_cb);
    const double g_zf = gap(Precoder::zf, mc_zf);
    const double t = seconds_since(t0);
    return {g_cb < kDetSinrTolerance && g_zf < kDetSinrTolerance && t < kLimitMonteCarlo,
            fmt("mean relative gap CB=%.4f ZF=%.4f (limit %.2f), %.1f s", g_cb, g_zf, kDetSinrTolerance, t)};
}

Outcome closed_forms()
{
    double worst = 0.0;
    for (int m : {16, 128, 512, 1024})
        for (int k : {1, 4, 16})
            for (double snr : {0.1, 10.0, 1e3}) {
                const auto lt = test::constant_fading(m, k, 1.0);
                const auto full = ActiveSet::full(m);
                const double s2 = 1e-3, p = snr * s2;
                const double cb = det_sinr(Precoder::cb, lt, full, p, s2).sinr[0];
                const double zf = det_sinr(Precoder::zf, lt, full, p, s2).sinr[0];
                worst = std::max(worst, rel(cb, m / ((k - 1) + k * s2 / p)));
                worst = std::max(worst, rel(zf, p / (k * s2) * (m - k + 1)));
            }
    return {worst < kClosedFormTolerance, fmt("worst relative error %.2e (limit %.0e)", worst, kClosedFormTolerance)};
}

Outcome analytic_agreement()
{
    const auto u = reference_umep();
    const int limit = validity_boundary(u);
    // Zero forcing needs Ms >= K; below that both forms are negative.
    double worst_gap = 0.0;
    int worst_ms = 0;
    for (int ms = u.users; ms <= limit; ms += 2) {
        const double g = rel(sinr_zf_ba(ms, u), sinr_zf_me(ms, u).sinr);
        if (g > worst_gap) {
            worst_gap = g;
            worst_ms = ms;
        }
    }
    double worst_d = 0.0;
    const double h = 1e-3;
    for (double ms = u.users; ms <= limit; ms += 1.0) {
        const auto d = sinr_zf_ba_derivatives(ms, u);
        const double fd1 = (sinr_zf_ba(ms + h, u) - sinr_zf_ba(ms - h, u)) / (2 * h);
        const double fd2 = (sinr_zf_ba_derivatives(ms + h, u).first - sinr_zf_ba_derivatives(ms - h, u).first) / (2 * h);
        const double fdf = (f_and_fprime(ms + h, u).f - f_and_fprime(ms - h, u).f) / (2 * h);
        worst_d = std::max({worst_d, rel(d.first, fd1), rel(d.second, fd2), rel(f_and_fprime(ms, u).fprime, fdf)});
    }
    return {worst_gap < kApproxGapTolerance && worst_d < kDerivativeTolerance,
            fmt("max BA/ME gap %.4f at Ms=%d over even Ms in [%d, %d] (limit %.2f); max derivative error %.2e "
                "(limit %.0e)",
                worst_gap, worst_ms, u.users, limit, kApproxGapTolerance, worst_d, kDerivativeTolerance)};
}

Outcome heuristic_sanity()
{
    const auto t0 = std::chrono::steady_clock::now();
    HeuristicParams generous;
    generous.n_it_max = 200;
    generous.early_stop_window = 200;
    generous.p_mut = 0.1;
    generous.ga_population = 20;
    generous.pso_swarm = 20;
    int matched = 0, instances = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto cfg = test::small_config(6, 2);
        const auto lt = test::random_drop(cfg, seed);
        const EeObjective objective(lt, cfg, PowerParams{});
        const auto best = test::enumerate_all(objective);
        for (auto kind : {Selector::ls, Selector::ga, Selector::pso}) {
            ++instances;
            const auto r = run_selector(kind, objective, 2, generous, seed);
            matched += rel(r.raw_ee, best.ee) < 1e-12 ? 1 : 0;
        }
    }

    ScenarioConfig cfg;
    const auto lt = test::random_drop(cfg, derive_seed(1, Stream::trial, {0}));
    const EeObjective objective(lt, cfg, PowerParams{});
    const int star = optimal_ms_newton(build_umep(cfg, PowerParams{})).ms_star;
    const double hrnp = hrnp_result(objective, star).raw_ee;
    bool above = true, monotone = true;
    std::string scale;
    for (auto kind : {Selector::ls, Selector::ga, Selector::pso}) {
        const auto r = run_selector(kind, objective, star, HeuristicParams{}, 1);
        above = above && r.raw_ee >= hrnp;
        if (kind == Selector::ls)
            for (std::size_t i = 1; i < r.trace.size(); ++i)
                monotone = monotone && r.trace[i] >= r.trace[i - 1];
        scale += fmt(" %s=%.2f", std::string(to_string(kind)).c_str(), r.raw_ee / 1e6);
    }
    const double t = seconds_since(t0);
    return {matched == instances && above && monotone && t < kLimitHeuristics,
            fmt("M=6 exhaustive matches %d/%d; M=500 raw EE [Mbit/J] hrnp=%.2f%s; LS trace monotone=%s, %.1f s",
                matched, instances, hrnp / 1e6, scale.c_str(), monotone ? "yes" : "no", t)};
}

Outcome mean_active_antennas()
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentSpec spec;
    spec.scenario = Scenario::sweep_selectors;
    spec.selector = SelectorChoice::all;
    spec.grid = {50, 100, 150};
    spec.trials = 20;
    const auto rows = run_experiment(spec);
    bool pass = true;
    std::string detail;
    for (const auto& r : rows) {
        if (r.selector == "hrnp")
            continue;
        ScenarioConfig cfg;
        cfg.num_users = r.k;
        const int star = optimal_ms_newton(build_umep(cfg, PowerParams{})).ms_star;
        const double dev = rel(r.mean_active_antennas, star);
        pass = pass && dev <= kActiveAntennaTolerance;
        detail += fmt(" K=%d %s %.1f/%d;", r.k, r.selector.c_str(), r.mean_active_antennas, star);
    }
    const double t = seconds_since(t0);
    return {pass && t < kLimitActive, fmt("mean |A| / Ms*:%s %.1f s", detail.c_str(), t)};
}

Outcome complexity()
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentSpec spec;
    spec.scenario = Scenario::complexity;
    spec.selector = SelectorChoice::all;
    spec.grid = {100};
    spec.trials = 20;
    const auto rows = run_experiment(spec);
    bool pass = true;
    std::string detail;
    for (const auto& r : rows) {
        // Order of magnitude = floor(log10); must sit within one of 10^5.
        const double order = std::floor(std::log10(r.relative_complexity));
        pass = pass && std::abs(order - kComplexityOrder) <= kComplexityOrderSlack;
        detail += fmt(" %s=%.3g (N_it=%.1f);", r.selector.c_str(), r.relative_complexity, r.mean_iterations);
    }
    return {pass, fmt("relative complexity vs HRNP:%s %.1f s", detail.c_str(), seconds_since(t0))};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria = {
        {1, "optimal active antenna count", optimal_antenna_count},
        {2, "Newton-Raphson convergence", newton_convergence},
        {3, "EE operating points", operating_points},
        {4, "approximation validity boundary", validity},
        {5, "ZF over CB energy efficiency", precoder_ordering},
        {6, "deterministic-equivalent fidelity", det_fidelity},
        {7, "uniform-gain closed forms", closed_forms},
        {8, "analytic SINR and derivative agreement", analytic_agreement},
        {9, "heuristic sanity", heuristic_sanity},
        {10, "mean active antennas", mean_active_antennas},
        {11, "selection complexity increment", complexity},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
