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


#ifndef XLMIMO_EXPERIMENT_HPP
#define XLMIMO_EXPERIMENT_HPP

#include "analytic.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "power.hpp"
#include "precoding.hpp"
#include "random.hpp"
#include "selection.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace xlmimo {

enum class Scenario { sweep_k, sweep_ms, convergence, sweep_selectors, complexity, single };
enum class PrecoderChoice { cb, zf, both };
enum class SelectorChoice { none, hrnp, ls, ga, pso, all };
enum class OutputFormat { csv, json };

inline std::string_view to_string(Scenario s)
{
    switch (s) {
    case Scenario::sweep_k: return "sweep_k";
    case Scenario::sweep_ms: return "sweep_ms";
    case Scenario::convergence: return "convergence";
    case Scenario::sweep_selectors: return "sweep_selectors";
    case Scenario::complexity: return "complexity";
    case Scenario::single: return "single";
    }
    return "?";
}

namespace detail {

template <class E, std::size_t N>
E parse_enum(std::string_view text, const std::pair<std::string_view, E> (&table)[N], std::string_view what)
{
    for (const auto& [name, value] : table)
        if (name == text)
            return value;
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
}

} // namespace detail

inline Scenario parse_scenario(std::string_view s)
{
    static constexpr std::pair<std::string_view, Scenario> table[] = {
        {"sweep_k", Scenario::sweep_k},         {"sweep_ms", Scenario::sweep_ms},
        {"convergence", Scenario::convergence}, {"sweep_selectors", Scenario::sweep_selectors},
        {"complexity", Scenario::complexity},   {"single", Scenario::single}};
    return detail::parse_enum(s, table, "scenario");
}

inline PrecoderChoice parse_precoder(std::string_view s)
{
    static constexpr std::pair<std::string_view, PrecoderChoice> table[] = {
        {"cb", PrecoderChoice::cb}, {"zf", PrecoderChoice::zf}, {"both", PrecoderChoice::both}};
    return detail::parse_enum(s, table, "precoder");
}

inline SelectorChoice parse_selector(std::string_view s)
{
    static constexpr std::pair<std::string_view, SelectorChoice> table[] = {
        {"none", SelectorChoice::none}, {"hrnp", SelectorChoice::hrnp}, {"ls", SelectorChoice::ls},
        {"ga", SelectorChoice::ga},     {"pso", SelectorChoice::pso},   {"all", SelectorChoice::all}};
    return detail::parse_enum(s, table, "selector");
}

inline OutputFormat parse_format(std::string_view s)
{
    static constexpr std::pair<std::string_view, OutputFormat> table[] = {{"csv", OutputFormat::csv},
                                                                          {"json", OutputFormat::json}};
    return detail::parse_enum(s, table, "format");
}

/// One experiment: what to sweep, which precoders/selectors, how many user drops.
struct ExperimentSpec {
    Scenario scenario = Scenario::single;
    PrecoderChoice precoder = PrecoderChoice::zf;
    std::optional<SelectorChoice> selector; // scenario-dependent default when unset
    std::optional<int> trials;              // 1000 for closed-form sweeps, 20 with iterative selectors
    std::uint64_t seed = 1;
    std::vector<int> grid;                  // K values, or Ms values for sweep_ms
    std::optional<int> ms;                  // unset = optimal_ms_newton
    int fading_draws = 0;                   // > 0: SINR from Monte-Carlo small-scale fading
    int threads = 0;                        // 0 = hardware concurrency, capped by XLMIMO_EE_THREADS

    ScenarioConfig config;
    PowerParams power;
    HeuristicParams heuristics;

    std::vector<Precoder> precoders() const
    {
        switch (precoder) {
        case PrecoderChoice::cb: return {Precoder::cb};
        case PrecoderChoice::zf: return {Precoder::zf};
        case PrecoderChoice::both: return {Precoder::cb, Precoder::zf};
        }
        return {};
    }

    SelectorChoice effective_selector() const
    {
        if (selector)
            return *selector;
        switch (scenario) {
        case Scenario::sweep_k: return SelectorChoice::none;
        case Scenario::sweep_ms:
        case Scenario::single: return SelectorChoice::hrnp;
        default: return SelectorChoice::all;
        }
    }

    std::vector<Selector> selectors() const
    {
        const bool iterative_only = scenario == Scenario::convergence || scenario == Scenario::complexity;
        switch (effective_selector()) {
        case SelectorChoice::none: return {Selector::none};
        case SelectorChoice::hrnp: return {Selector::hrnp};
        case SelectorChoice::ls: return {Selector::ls};
        case SelectorChoice::ga: return {Selector::ga};
        case SelectorChoice::pso: return {Selector::pso};
        case SelectorChoice::all:
            if (iterative_only)
                return {Selector::ls, Selector::ga, Selector::pso};
            return {Selector::hrnp, Selector::ls, Selector::ga, Selector::pso};
        }
        return {};
    }

    int effective_trials() const
    {
        if (trials)
            return *trials;
        for (auto s : selectors())
            if (s == Selector::ls || s == Selector::ga || s == Selector::pso)
                return 20;
        return 1000;
    }

    bool is_sweep() const
    {
        return scenario == Scenario::sweep_k || scenario == Scenario::sweep_ms ||
               scenario == Scenario::sweep_selectors || scenario == Scenario::complexity;
    }

    void validate() const
    {
        if (effective_trials() < 1)
            throw ConfigError("trials must be >= 1");
        if (is_sweep() && grid.empty())
            throw ConfigError("scenario " + std::string(to_string(scenario)) + " needs a non-empty grid");
        if (fading_draws < 0)
            throw ConfigError("fading_draws must be >= 0");
        if (ms && *ms < 1)
            throw ConfigError("ms must be >= 1");
        if (scenario == Scenario::sweep_ms && effective_selector() != SelectorChoice::hrnp)
            throw ConfigError("sweep_ms sweeps the HRNP subset size; selector must be hrnp");
        if (scenario == Scenario::convergence || scenario == Scenario::complexity)
            for (auto s : selectors())
                if (s == Selector::none || s == Selector::hrnp)
                    throw ConfigError(std::string(to_string(scenario)) + " needs an iterative selector (ls, ga, pso or all)");
        bool zf = false;
        for (auto p : precoders())
            zf = zf || p == Precoder::zf;
        const bool k_from_grid = scenario == Scenario::sweep_k || scenario == Scenario::sweep_selectors ||
                                 scenario == Scenario::complexity;
        config.validate(zf && !k_from_grid);
        heuristics.validate();
        power.validate(config.num_users);
        for (int g : grid) {
            if (g < 1)
                throw ConfigError("grid values must be >= 1");
            if (scenario == Scenario::sweep_ms && g > config.num_antennas)
                throw ConfigError("sweep_ms grid value " + std::to_string(g) + " exceeds M");
            if (scenario == Scenario::sweep_ms && zf && g < config.num_users)
                throw ConfigError("sweep_ms grid value " + std::to_string(g) + " is below K under zero-forcing");
            if (scenario != Scenario::sweep_ms) {
                if (zf && g > config.num_antennas)
                    throw ConfigError("grid K = " + std::to_string(g) + " exceeds M under zero-forcing");
                power.validate(g);
            }
        }
    }
};

namespace detail {

using json = nlohmann::json;

inline double as_number(const json& v, const std::string& key)
{
    if (!v.is_number())
        throw ConfigError("parse failure: key '" + key + "' expects a number", ConfigError::Kind::parse_failure);
    return v.get<double>();
}

inline int as_int(const json& v, const std::string& key)
{
    const double d = as_number(v, key);
    if (d != std::floor(d) || std::abs(d) > std::numeric_limits<int>::max())
        throw ConfigError("parse failure: key '" + key + "' expects an integer", ConfigError::Kind::parse_failure);
    return static_cast<int>(d);
}

inline std::string as_string(const json& v, const std::string& key)
{
    if (!v.is_string())
        throw ConfigError("parse failure: key '" + key + "' expects a string", ConfigError::Kind::parse_failure);
    return v.get<std::string>();
}

using Setter = std::function<void(ExperimentSpec&, const json&, const std::string&)>;

inline const std::map<std::string, Setter>& config_keys()
{
    static const std::map<std::string, Setter> keys = [] {
        std::map<std::string, Setter> k;
        const auto num = [](double ScenarioConfig::*f) {
            return [f](ExperimentSpec& s, const json& v, const std::string& key) { s.config.*f = as_number(v, key); };
        };
        const auto pnum = [](double PowerParams::*f) {
            return [f](ExperimentSpec& s, const json& v, const std::string& key) { s.power.*f = as_number(v, key); };
        };
        const auto hnum = [](double HeuristicParams::*f) {
            return [f](ExperimentSpec& s, const json& v, const std::string& key) { s.heuristics.*f = as_number(v, key); };
        };
        const auto hint = [](int HeuristicParams::*f) {
            return [f](ExperimentSpec& s, const json& v, const std::string& key) { s.heuristics.*f = as_int(v, key); };
        };

        k["scenario"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.scenario = parse_scenario(as_string(v, key)); };
        k["precoder"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.precoder = parse_precoder(as_string(v, key)); };
        k["selector"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.selector = parse_selector(as_string(v, key)); };
        k["trials"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.trials = as_int(v, key); };
        k["seed"] = [](ExperimentSpec& s, const json& v, const std::string& key) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
                throw ConfigError("parse failure: key '" + key + "' expects an unsigned integer", ConfigError::Kind::parse_failure);
            s.seed = v.get<std::uint64_t>();
        };
        k["grid"] = [](ExperimentSpec& s, const json& v, const std::string& key) {
            if (!v.is_array())
                throw ConfigError("parse failure: key '" + key + "' expects an array", ConfigError::Kind::parse_failure);
            s.grid.clear();
            for (const auto& e : v)
                s.grid.push_back(as_int(e, key));
        };
        k["ms"] = [](ExperimentSpec& s, const json& v, const std::string& key) {
            if (v.is_string() && v.get<std::string>() == "auto")
                s.ms.reset();
            else
                s.ms = as_int(v, key);
        };
        k["fading_draws"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.fading_draws = as_int(v, key); };
        k["threads"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.threads = as_int(v, key); };

        k["m"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.config.num_antennas = as_int(v, key); };
        k["k"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.config.num_users = as_int(v, key); };
        k["l"] = num(&ScenarioConfig::array_length);
        k["kappa"] = num(&ScenarioConfig::path_loss_exponent);
        k["q"] = num(&ScenarioConfig::reference_gain);
        k["noise_power"] = num(&ScenarioConfig::noise_power);
        k["p_max"] = num(&ScenarioConfig::p_max);
        k["rho"] = [](ExperimentSpec& s, const json& v, const std::string& key) {
            if (v.is_null())
                s.config.rho.reset();
            else
                s.config.rho = as_number(v, key);
        };
        k["y_min_frac"] = num(&ScenarioConfig::y_min_frac);
        k["y_max_frac"] = num(&ScenarioConfig::y_max_frac);

        k["b"] = pnum(&PowerParams::bandwidth);
        k["s"] = pnum(&PowerParams::coherence_block);
        k["tau"] = [](ExperimentSpec& s, const json& v, const std::string& key) {
            if (v.is_null())
                s.power.pilot_length.reset();
            else
                s.power.pilot_length = as_number(v, key);
        };
        k["t_lt"] = pnum(&PowerParams::long_term_coherence);
        k["l_bs"] = pnum(&PowerParams::computational_efficiency);
        k["eta_dl"] = pnum(&PowerParams::pa_efficiency_bs);
        k["eta_ul_mt"] = pnum(&PowerParams::pa_efficiency_mt);
        k["xi_dl"] = pnum(&PowerParams::dl_fraction);
        k["xi_ul"] = pnum(&PowerParams::ul_fraction);
        k["rho_p"] = pnum(&PowerParams::pilot_power);
        k["p_fix"] = pnum(&PowerParams::p_fix);
        k["p_syn"] = pnum(&PowerParams::p_syn);
        k["p_bs"] = pnum(&PowerParams::p_bs);
        k["p_mt"] = pnum(&PowerParams::p_mt);
        k["p_cod"] = pnum(&PowerParams::p_cod);
        k["p_dec"] = pnum(&PowerParams::p_dec);
        k["p_bt"] = pnum(&PowerParams::p_bt);

        k["n_it_max"] = hint(&HeuristicParams::n_it_max);
        k["early_stop_window"] = hint(&HeuristicParams::early_stop_window);
        k["d_ham"] = hint(&HeuristicParams::d_ham);
        k["p_ga"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.heuristics.ga_population = as_int(v, key); };
        k["parent_frac"] = hnum(&HeuristicParams::parent_frac);
        k["p_mut"] = hnum(&HeuristicParams::p_mut);
        k["p_pso"] = [](ExperimentSpec& s, const json& v, const std::string& key) { s.heuristics.pso_swarm = as_int(v, key); };
        k["nu"] = hnum(&HeuristicParams::inertia);
        k["mu_c"] = hnum(&HeuristicParams::cognitive);
        k["mu_s"] = hnum(&HeuristicParams::social);
        return k;
    }();
    return keys;
}

inline json parse_document(const std::string& text, const std::string& origin)
{
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return json::object();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("parse failure in " + origin + ": " + e.what(), ConfigError::Kind::parse_failure);
    }
    if (!doc.is_object())
        throw ConfigError("parse failure in " + origin + ": expected a flat JSON object",
                          ConfigError::Kind::parse_failure);
    return doc;
}

} // namespace detail

/// Builds a spec from reference defaults, then the JSON document `text`, then
/// `overrides` (later layers win). Setting p_max without rho switches the
/// scenario to a fixed radiated power.
inline ExperimentSpec parse_config(const std::string& text, const nlohmann::json& overrides = nlohmann::json::object(),
                                   const std::string& origin = "config")
{
    auto merged = detail::parse_document(text, origin);
    if (!overrides.is_object())
        throw ConfigError("overrides must be a JSON object", ConfigError::Kind::parse_failure);
    for (const auto& [key, value] : overrides.items())
        merged[key] = value;

    ExperimentSpec spec;
    const auto& keys = detail::config_keys();
    for (const auto& [key, value] : merged.items()) {
        const auto it = keys.find(key);
        if (it == keys.end())
            throw ConfigError("unknown key '" + key + "'", ConfigError::Kind::unknown_key);
        it->second(spec, value, key);
    }
    if (merged.contains("p_max") && !merged.contains("rho"))
        spec.config.rho.reset();
    spec.validate();
    return spec;
}

inline ExperimentSpec load_config(const std::string& path, const nlohmann::json& overrides = nlohmann::json::object())
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'", ConfigError::Kind::parse_failure);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), overrides, path);
}

/// One averaged output line. SINR in dB, SE in bit/channel use, EE in bit/J.
struct ResultRow {
    std::string scenario;
    int k = 0;
    int ms = 0;
    std::string precoder;
    std::string selector;
    double mean_sinr_db = 0.0;
    double sum_se_bpcu = 0.0;
    double ee_bits_per_joule = 0.0;
    double mean_active_antennas = 0.0;
    double mean_iterations = 0.0;
    double c_as_flops = 0.0;
    double relative_complexity = 0.0; // (C_as - C_hrnp) / C_hrnp

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "scenario,k,ms,precoder,selector,mean_sinr_db,sum_se_bpcu,ee_bits_per_joule,mean_active_antennas,"
    "mean_iterations,c_as_flops,relative_complexity";

/// Outcome of one selector on one user drop.
struct TrialOutcome {
    double mean_sinr = 0.0;
    double sum_se = 0.0;
    double ee = 0.0;
    double active = 0.0;
    double iterations = 0.0;
    double c_as = 0.0;
    std::vector<double> trace;
};

namespace detail {

inline int worker_count(int requested, int jobs)
{
    int n = requested > 0 ? requested : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("XLMIMO_EE_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1)
            n = std::min<long>(n, cap);
    }
    return std::max(1, std::min(n, jobs));
}

// Runs job(i) for i in [0, count) on up to `threads` workers. Results must be
// written to slot i by the job; the first failing index (lowest) is rethrown.
template <class Job>
void parallel_for(int count, int threads, Job&& job)
{
    const int workers = worker_count(threads, count);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    const auto run = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                job(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(run);
        for (auto& t : pool)
            t.join();
    }
    for (int i = 0; i < count; ++i) {
        if (!errors[static_cast<std::size_t>(i)])
            continue;
        try {
            std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
        } catch (const std::exception& e) {
            throw Error("trial " + std::to_string(i) + " failed: " + e.what());
        }
    }
}

inline double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace detail

/// Metrics for one selector on one user drop. With fading_draws > 0 the SINRs
/// are Monte-Carlo averages of the instantaneous SINR of the precoded channel.
inline TrialOutcome evaluate_trial(const LongTermFadingMatrix& lt, const ScenarioConfig& cfg, const PowerParams& pp,
                                   Precoder precoder, Selector selector, int active_count,
                                   const HeuristicParams& heuristics, int fading_draws, std::uint64_t trial_seed)
{
    const EeObjective objective(lt, cfg, pp, precoder);
    const auto sel = run_selector(selector, objective, active_count, heuristics, trial_seed);

    TrialOutcome out;
    out.active = sel.active.size();
    out.iterations = sel.iterations;
    out.c_as = sel.flops_spent;
    out.trace = sel.trace;

    std::vector<double> sinr;
    if (fading_draws > 0) {
        sinr.assign(static_cast<std::size_t>(cfg.num_users), 0.0);
        for (int d = 0; d < fading_draws; ++d) {
            const auto ch = draw_channel(lt, derive_seed(trial_seed, Stream::fading, {static_cast<std::uint64_t>(d)}));
            const auto h = restrict_rows(ch.h, sel.active);
            const auto rep = instantaneous_sinr(h, precode(precoder, h, cfg.transmit_power()), cfg.noise_power);
            for (std::size_t k = 0; k < sinr.size(); ++k)
                sinr[k] += rep.sinr[k] / fading_draws;
        }
    } else if (!(precoder == Precoder::zf && sel.active.size() < cfg.num_users)) {
        sinr = det_sinr(precoder, lt, sel.active, cfg.transmit_power(), cfg.noise_power).sinr;
    } else {
        sinr.assign(static_cast<std::size_t>(cfg.num_users), 0.0);
    }
    const auto report = make_sinr_report(std::move(sinr));
    out.mean_sinr = detail::mean_of(report.sinr);
    out.sum_se = report.sum_se;
    const auto pb = power_breakdown(cfg, pp, sel.active.size(), pp.bandwidth * out.sum_se, sel.flops_spent,
                                    selector != Selector::none, precoder);
    out.ee = energy_efficiency(out.sum_se, pp.bandwidth, pb);
    return out;
}

/// Newton optimum of the active-antenna count for `cfg`.
inline int auto_active_count(const ScenarioConfig& cfg, const PowerParams& pp)
{
    return optimal_ms_newton(build_umep(cfg, pp)).ms_star;
}

inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    const int trials = spec.effective_trials();
    const auto precoders = spec.precoders();
    const auto selectors = spec.selectors();

    struct Point {
        int users;
        std::optional<int> active; // unset: Newton optimum
    };
    std::vector<Point> points;
    switch (spec.scenario) {
    case Scenario::single:
    case Scenario::convergence:
        points.push_back({spec.config.num_users, spec.ms});
        break;
    case Scenario::sweep_ms:
        for (int g : spec.grid)
            points.push_back({spec.config.num_users, g});
        break;
    default:
        for (int g : spec.grid)
            points.push_back({g, spec.ms});
        break;
    }

    std::vector<ResultRow> rows;
    for (const auto& point : points) {
        ScenarioConfig cfg = spec.config;
        cfg.num_users = point.users;
        const bool full_array_only =
            std::all_of(selectors.begin(), selectors.end(), [](Selector s) { return s == Selector::none; });
        const int active = point.active       ? *point.active
                           : full_array_only ? cfg.num_antennas
                                             : auto_active_count(cfg, spec.power);
        if (active > cfg.num_antennas)
            throw ConfigError("active antenna count " + std::to_string(active) + " exceeds M");
        const auto geom = ArrayGeometry::uniform(cfg);
        const double c_hrnp = flop_cost(FlopKind::as_hrnp, {.users = cfg.num_users, .antennas = cfg.num_antennas});

        const std::size_t combos = precoders.size() * selectors.size();
        std::vector<std::vector<TrialOutcome>> outcomes(static_cast<std::size_t>(trials));
        detail::parallel_for(trials, spec.threads, [&](int t) {
            const std::uint64_t trial_seed = derive_seed(spec.seed, Stream::trial, {static_cast<std::uint64_t>(t)});
            const auto lt = long_term_fading(geom, place_users(cfg, trial_seed), cfg);
            auto& slot = outcomes[static_cast<std::size_t>(t)];
            slot.reserve(combos);
            for (auto p : precoders)
                for (auto s : selectors)
                    slot.push_back(evaluate_trial(lt, cfg, spec.power, p, s, active, spec.heuristics,
                                                  spec.fading_draws, trial_seed));
        });

        std::size_t c = 0;
        for (auto p : precoders) {
            for (auto s : selectors) {
                ResultRow base;
                base.scenario = std::string(to_string(spec.scenario));
                base.k = cfg.num_users;
                base.ms = s == Selector::none ? cfg.num_antennas : active;
                base.precoder = std::string(to_string(p));
                base.selector = std::string(to_string(s));
                double sinr = 0.0;
                for (const auto& slot : outcomes) {
                    const auto& o = slot[c];
                    sinr += o.mean_sinr;
                    base.sum_se_bpcu += o.sum_se;
                    base.ee_bits_per_joule += o.ee;
                    base.mean_active_antennas += o.active;
                    base.mean_iterations += o.iterations;
                    base.c_as_flops += o.c_as;
                    base.relative_complexity += (o.c_as - c_hrnp) / c_hrnp;
                }
                const double n = trials;
                sinr /= n;
                base.mean_sinr_db = 10.0 * std::log10(std::max(sinr, 1e-30));
                base.sum_se_bpcu /= n;
                base.ee_bits_per_joule /= n;
                base.mean_active_antennas /= n;
                base.mean_iterations /= n;
                base.c_as_flops /= n;
                base.relative_complexity /= n;

                if (spec.scenario != Scenario::convergence) {
                    rows.push_back(base);
                } else {
                    // One row per iteration: mean best-so-far raw EE, holding each
                    // trial's last value after it stopped.
                    for (int it = 0; it < spec.heuristics.n_it_max; ++it) {
                        ResultRow r = base;
                        r.mean_iterations = it + 1;
                        double ee = 0.0;
                        for (const auto& slot : outcomes) {
                            const auto& tr = slot[c].trace;
                            ee += tr.empty() ? 0.0 : tr[std::min(tr.size() - 1, static_cast<std::size_t>(it))];
                        }
                        r.ee_bits_per_joule = ee / n;
                        rows.push_back(r);
                    }
                }
                ++c;
            }
        }
    }
    return rows;
}

namespace detail {

inline std::string format_number(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

} // namespace detail

inline nlohmann::ordered_json to_json(const ResultRow& r)
{
    return {{"scenario", r.scenario},
            {"k", r.k},
            {"ms", r.ms},
            {"precoder", r.precoder},
            {"selector", r.selector},
            {"mean_sinr_db", r.mean_sinr_db},
            {"sum_se_bpcu", r.sum_se_bpcu},
            {"ee_bits_per_joule", r.ee_bits_per_joule},
            {"mean_active_antennas", r.mean_active_antennas},
            {"mean_iterations", r.mean_iterations},
            {"c_as_flops", r.c_as_flops},
            {"relative_complexity", r.relative_complexity}};
}

inline ResultRow row_from_json(const nlohmann::json& j)
{
    ResultRow r;
    try {
        r.scenario = j.at("scenario").get<std::string>();
        r.k = j.at("k").get<int>();
        r.ms = j.at("ms").get<int>();
        r.precoder = j.at("precoder").get<std::string>();
        r.selector = j.at("selector").get<std::string>();
        r.mean_sinr_db = j.at("mean_sinr_db").get<double>();
        r.sum_se_bpcu = j.at("sum_se_bpcu").get<double>();
        r.ee_bits_per_joule = j.at("ee_bits_per_joule").get<double>();
        r.mean_active_antennas = j.at("mean_active_antennas").get<double>();
        r.mean_iterations = j.at("mean_iterations").get<double>();
        r.c_as_flops = j.at("c_as_flops").get<double>();
        r.relative_complexity = j.at("relative_complexity").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed result row: ") + e.what(), ConfigError::Kind::parse_failure);
    }
    return r;
}

inline void write_results(const std::vector<ResultRow>& rows, std::ostream& out, OutputFormat format)
{
    if (rows.empty())
        throw Error("write_results: no rows to write");
    if (format == OutputFormat::json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : rows)
            arr.push_back(to_json(r));
        out << arr.dump(2) << '\n';
        return;
    }
    using detail::format_number;
    out << kCsvHeader << '\n';
    for (const auto& r : rows)
        out << r.scenario << ',' << r.k << ',' << r.ms << ',' << r.precoder << ',' << r.selector << ','
            << format_number(r.mean_sinr_db) << ',' << format_number(r.sum_se_bpcu) << ','
            << format_number(r.ee_bits_per_joule) << ',' << format_number(r.mean_active_antennas) << ','
            << format_number(r.mean_iterations) << ',' << format_number(r.c_as_flops) << ','
            << format_number(r.relative_complexity) << '\n';
}

inline void write_results(const std::vector<ResultRow>& rows, const std::string& path, OutputFormat format)
{
    if (rows.empty())
        throw Error("write_results: no rows to write");
    std::ofstream out(path);
    if (!out)
        throw Error("write_results: cannot open '" + path + "' for writing");
    write_results(rows, out, format);
    if (!out)
        throw Error("write_results: write to '" + path + "' failed");
}

inline std::vector<ResultRow> read_results_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open results file '" + path + "'", ConfigError::Kind::parse_failure);
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("parse failure: ") + e.what(), ConfigError::Kind::parse_failure);
    }
    std::vector<ResultRow> rows;
    for (const auto& j : arr)
        rows.push_back(row_from_json(j));
    return rows;
}

} // namespace xlmimo

#endif
