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


#ifndef XLMIMO_SELECTION_HPP
#define XLMIMO_SELECTION_HPP

#include "active_set.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "power.hpp"
#include "precoding.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace xlmimo {

enum class Selector { none, hrnp, ls, ga, pso };

inline std::string_view to_string(Selector s)
{
    switch (s) {
    case Selector::none: return "none";
    case Selector::hrnp: return "hrnp";
    case Selector::ls: return "ls";
    case Selector::ga: return "ga";
    case Selector::pso: return "pso";
    }
    return "?";
}

/// Tuning knobs for the iterative selectors. Population and swarm sizes default
/// to M/2 and M/5.
struct HeuristicParams {
    int n_it_max = 60;
    int early_stop_window = 5; // GA/PSO generations without a new best before stopping
    int d_ham = 1;             // LS neighbourhood radius
    std::optional<int> ga_population;
    double parent_frac = 0.10;
    double p_mut = 0.02;
    std::optional<int> pso_swarm;
    double inertia = 0.5;   // nu
    double cognitive = 0.5; // mu_c
    double social = 0.5;    // mu_s

    int ga_size(int antennas) const { return ga_population.value_or(antennas / 2); }
    int pso_size(int antennas) const { return pso_swarm.value_or(std::max(1, antennas / 5)); }

    void validate() const
    {
        if (n_it_max < 1)
            throw ConfigError("n_it_max must be >= 1");
        if (early_stop_window < 1)
            throw ConfigError("early_stop_window must be >= 1");
        if (d_ham < 1)
            throw ConfigError("d_ham must be >= 1");
        if (!(parent_frac > 0.0 && parent_frac <= 1.0))
            throw ConfigError("parent_frac must lie in (0, 1]");
        if (!(p_mut >= 0.0 && p_mut <= 1.0))
            throw ConfigError("p_mut must lie in [0, 1]");
        if (ga_population && *ga_population < 2)
            throw ConfigError("ga_population must be >= 2");
        if (pso_swarm && *pso_swarm < 1)
            throw ConfigError("pso_swarm must be >= 1");
    }
};

struct SelectionResult {
    ActiveSet active;
    double ee = 0.0;          // charged with the scheme's realized selection cost
    double raw_ee = 0.0;      // under the search-time cost (C_as = C_hrnp)
    int iterations = 0;
    double flops_spent = 0.0; // realized C_as
    std::vector<double> trace; // best-so-far raw EE, one entry per iteration
};

/// phi_m = sum_k beta(m, k) / sum_j beta(j, k).
inline std::vector<double> hrnp_metric(const LongTermFadingMatrix& lt)
{
    const auto m_count = static_cast<std::size_t>(lt.antennas());
    std::vector<double> phi(m_count, 0.0);
    for (int k = 0; k < lt.users(); ++k) {
        const double total = lt.beta.col(k).sum();
        if (!(total > 0.0))
            throw ConfigError("hrnp_metric: user " + std::to_string(k) + " has zero total gain");
        for (std::size_t m = 0; m < m_count; ++m)
            phi[m] += lt.beta(static_cast<Eigen::Index>(m), k) / total;
    }
    return phi;
}

/// The `count` antennas with the largest phi_m; ties go to the lower index.
inline ActiveSet top_antennas(std::span<const double> phi, int count)
{
    const int total = static_cast<int>(phi.size());
    if (count < 1 || count > total)
        throw ConfigError("hrnp_select: Ms = " + std::to_string(count) + " outside [1, " + std::to_string(total) + "]");
    std::vector<int> order(phi.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return phi[static_cast<std::size_t>(a)] > phi[static_cast<std::size_t>(b)];
    });
    order.resize(static_cast<std::size_t>(count));
    return ActiveSet(std::move(order), total);
}

inline ActiveSet hrnp_select(const LongTermFadingMatrix& lt, int count)
{
    const auto phi = hrnp_metric(lt);
    return top_antennas(phi, count);
}

/// Total energy efficiency of a candidate mask. During a search the selection
/// cost is pinned at C_hrnp for every candidate, so it shifts all candidates'
/// power equally and leaves the ranking untouched.
class EeObjective {
public:
    EeObjective(const LongTermFadingMatrix& lt, const ScenarioConfig& cfg, const PowerParams& pp,
                Precoder precoder = Precoder::zf)
        : lt_(&lt), cfg_(cfg), pp_(pp), precoder_(precoder), p_max_(cfg.transmit_power())
    {
        if (lt.users() != cfg.num_users || lt.antennas() != cfg.num_antennas)
            throw ConfigError("EeObjective: fading matrix does not match the scenario dimensions");
        pp_.validate(cfg.num_users);
        c_hrnp_ = flop_cost(FlopKind::as_hrnp, {.users = cfg.num_users, .antennas = cfg.num_antennas});
    }

    /// Search-time EE; infeasible masks (empty, or fewer than K antennas under ZF) score 0.
    double operator()(std::span<const std::uint8_t> mask) const { return evaluate_mask(mask, c_hrnp_); }

    double evaluate(const ActiveSet& active, double c_as) const { return evaluate_indices(active.indices(), c_as, true); }

    /// EE with no selection stage at all (C_as not charged).
    double evaluate_without_selection(const ActiveSet& active) const
    {
        return evaluate_indices(active.indices(), 0.0, false);
    }

    double evaluate_mask(std::span<const std::uint8_t> mask, double c_as) const
    {
        std::vector<int> idx;
        idx.reserve(mask.size());
        for (std::size_t m = 0; m < mask.size(); ++m)
            if (mask[m])
                idx.push_back(static_cast<int>(m));
        return evaluate_indices(idx, c_as, true);
    }

    double hrnp_cost() const { return c_hrnp_; }
    int antennas() const { return cfg_.num_antennas; }
    int users() const { return cfg_.num_users; }
    const ScenarioConfig& config() const { return cfg_; }
    const PowerParams& power_params() const { return pp_; }
    const LongTermFadingMatrix& fading() const { return *lt_; }
    Precoder precoder() const { return precoder_; }

private:
    double evaluate_indices(std::span<const int> idx, double c_as, bool charged) const
    {
        const int count = static_cast<int>(idx.size());
        if (count == 0 || (precoder_ == Precoder::zf && count < cfg_.num_users))
            return 0.0;
        std::vector<double> sinr, col_sum, weight;
        detail::det_sinr_into(precoder_, lt_->beta, idx, p_max_, cfg_.noise_power, sinr, col_sum, weight);
        double se = 0.0;
        for (double g : sinr)
            se += std::log2(1.0 + g);
        const auto pb = power_breakdown(cfg_, pp_, count, pp_.bandwidth * se, c_as, charged, precoder_);
        return energy_efficiency(se, pp_.bandwidth, pb);
    }

    const LongTermFadingMatrix* lt_;
    ScenarioConfig cfg_;
    PowerParams pp_;
    Precoder precoder_;
    double p_max_;
    double c_hrnp_ = 0.0;
};

inline double ee_objective(std::span<const std::uint8_t> mask, const EeObjective& context) { return context(mask); }

/// HRNP as a SelectionResult: no search, C_as = C_hrnp.
inline SelectionResult hrnp_result(const EeObjective& objective, int count)
{
    SelectionResult r;
    r.active = hrnp_select(objective.fading(), count);
    r.raw_ee = objective.evaluate(r.active, objective.hrnp_cost());
    r.ee = r.raw_ee;
    r.flops_spent = objective.hrnp_cost();
    return r;
}

namespace detail {

// Visits every index subset of size 1..radius in lexicographic order until
// `visit` returns true.
template <class Visit>
bool for_each_flip_set(int total, int radius, Visit&& visit)
{
    std::vector<int> c;
    for (int r = 1; r <= std::min(radius, total); ++r) {
        c.resize(static_cast<std::size_t>(r));
        std::iota(c.begin(), c.end(), 0);
        while (true) {
            if (visit(std::span<const int>(c)))
                return true;
            int i = r - 1;
            while (i >= 0 && c[static_cast<std::size_t>(i)] == total - r + i)
                --i;
            if (i < 0)
                break;
            ++c[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < r; ++j)
                c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return false;
}

inline void flip(Mask& mask, std::span<const int> positions)
{
    for (int p : positions)
        mask[static_cast<std::size_t>(p)] ^= 1U;
}

inline Mask random_mask(int total, Engine& engine)
{
    std::bernoulli_distribution coin(0.5);
    Mask m(static_cast<std::size_t>(total));
    for (auto& bit : m)
        bit = coin(engine) ? 1 : 0;
    return m;
}

} // namespace detail

/// First-improvement hill climbing over Hamming neighbours of radius d_ham.
/// Neighbours are scanned in index order; an improvement is accepted at once
/// and the next sweep starts from it. Stops after a sweep without improvement
/// or after n_it_max sweeps. The scan is deterministic; `seed` is unused.
inline SelectionResult ls_select(const ActiveSet& init, const HeuristicParams& params, const EeObjective& objective,
                                 [[maybe_unused]] std::uint64_t seed = 0)
{
    params.validate();
    const int total = objective.antennas();
    Mask mask = init.mask();
    double best = objective(mask);

    SelectionResult r;
    while (r.iterations < params.n_it_max) {
        ++r.iterations;
        const bool improved = detail::for_each_flip_set(total, params.d_ham, [&](std::span<const int> flips) {
            detail::flip(mask, flips);
            const double e = objective(mask);
            if (e > best) {
                best = e;
                return true;
            }
            detail::flip(mask, flips);
            return false;
        });
        r.trace.push_back(best);
        if (!improved)
            break;
    }
    r.active = ActiveSet::from_mask(mask);
    r.raw_ee = best;
    r.flops_spent = flop_cost(FlopKind::as_ls, {.users = objective.users(), .antennas = total,
                                                .mean_iterations = static_cast<double>(r.iterations)});
    r.ee = objective.evaluate(r.active, r.flops_spent);
    return r;
}

namespace detail {

// Evolves `pop` (size >= 2) until n_it_max generations or early_stop_window
// generations without a new best.
inline SelectionResult ga_evolve(std::vector<Mask> pop, const HeuristicParams& params, const EeObjective& objective,
                                 Engine& engine)
{
    const int total = objective.antennas();
    const int pop_size = static_cast<int>(pop.size());
    if (pop_size < 2)
        throw ConfigError("ga_select: population must hold at least 2 candidates");
    std::vector<double> fit(pop.size());

    // Evaluates and sorts the population by descending fitness.
    const auto rank = [&] {
        for (std::size_t i = 0; i < pop.size(); ++i)
            fit[i] = objective(pop[i]);
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fit[a] > fit[b]; });
        std::vector<Mask> sorted_pop;
        std::vector<double> sorted_fit;
        sorted_pop.reserve(pop.size());
        sorted_fit.reserve(pop.size());
        for (auto i : order) {
            sorted_pop.push_back(std::move(pop[i]));
            sorted_fit.push_back(fit[i]);
        }
        pop = std::move(sorted_pop);
        fit = std::move(sorted_fit);
    };

    rank();
    double best = fit.front();
    Mask best_mask = pop.front();
    SelectionResult r;
    r.iterations = 1;
    r.trace.push_back(best);

    const int parents = std::clamp(static_cast<int>(std::ceil(params.parent_frac * pop_size)), 2, pop_size);
    std::uniform_int_distribution<int> pick_first(0, parents - 1);
    std::uniform_int_distribution<int> pick_second(0, parents - 2);
    std::uniform_int_distribution<int> pick_cut(1, std::max(1, total - 1));
    std::bernoulli_distribution mutate(params.p_mut);

    int stall = 0;
    while (r.iterations < params.n_it_max && stall < params.early_stop_window) {
        std::vector<Mask> next;
        next.reserve(pop.size());
        for (int l = 0; l < pop_size; ++l) {
            const int a = pick_first(engine);
            int b = pick_second(engine);
            if (b >= a)
                ++b;
            const int cut = total > 1 ? pick_cut(engine) : total;
            Mask child(static_cast<std::size_t>(total));
            for (int m = 0; m < total; ++m) {
                const auto& src = m < cut ? pop[static_cast<std::size_t>(a)] : pop[static_cast<std::size_t>(b)];
                child[static_cast<std::size_t>(m)] = src[static_cast<std::size_t>(m)];
            }
            if (params.p_mut > 0.0)
                for (auto& bit : child)
                    if (mutate(engine))
                        bit ^= 1U;
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        rank();
        ++r.iterations;
        if (fit.front() > best) {
            best = fit.front();
            best_mask = pop.front();
            stall = 0;
        } else {
            ++stall;
        }
        r.trace.push_back(best);
    }

    r.active = ActiveSet::from_mask(best_mask);
    r.raw_ee = best;
    r.flops_spent = flop_cost(FlopKind::as_ga, {.users = objective.users(), .antennas = total,
                                                .mean_iterations = static_cast<double>(r.iterations),
                                                .ga_population = pop_size});
    r.ee = objective.evaluate(r.active, r.flops_spent);
    return r;
}

} // namespace detail

/// Genetic search. The population is seeded with `init` plus random masks and
/// fully replaced every generation by crossover children of the best parents;
/// the global best is tracked on the side.
inline SelectionResult ga_select(const ActiveSet& init, const HeuristicParams& params, const EeObjective& objective,
                                 std::uint64_t seed)
{
    params.validate();
    const int total = objective.antennas();
    const int pop_size = params.ga_size(total);
    if (pop_size < 2)
        throw ConfigError("ga_select: population must hold at least 2 candidates");
    auto engine = make_engine(seed, Stream::genetic);
    std::vector<Mask> pop;
    pop.reserve(static_cast<std::size_t>(pop_size));
    pop.push_back(init.mask());
    for (int i = 1; i < pop_size; ++i)
        pop.push_back(detail::random_mask(total, engine));
    return detail::ga_evolve(std::move(pop), params, objective, engine);
}

/// Binary particle swarm. Velocities are real and unclamped; positions are
/// re-binarized with x > 0.5 after every move.
inline SelectionResult pso_select(const ActiveSet& init, const HeuristicParams& params, const EeObjective& objective,
                                  std::uint64_t seed)
{
    params.validate();
    const int total = objective.antennas();
    const int swarm = params.pso_size(total);
    auto engine = make_engine(seed, Stream::swarm);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);

    std::vector<Mask> pos;
    pos.reserve(static_cast<std::size_t>(swarm));
    pos.push_back(init.mask());
    for (int i = 1; i < swarm; ++i)
        pos.push_back(detail::random_mask(total, engine));
    std::vector<std::vector<double>> vel(static_cast<std::size_t>(swarm), std::vector<double>(static_cast<std::size_t>(total)));
    for (auto& v : vel)
        for (auto& x : v)
            x = sym(engine);

    std::vector<double> own_best(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
        own_best[i] = objective(pos[i]);
    std::vector<Mask> own_best_pos = pos;
    const auto lead = static_cast<std::size_t>(std::max_element(own_best.begin(), own_best.end()) - own_best.begin());
    double best = own_best[lead];
    Mask best_mask = pos[lead];

    SelectionResult r;
    r.iterations = 1;
    r.trace.push_back(best);

    int stall = 0;
    while (r.iterations < params.n_it_max && stall < params.early_stop_window) {
        for (std::size_t l = 0; l < pos.size(); ++l) {
            auto& v = vel[l];
            auto& x = pos[l];
            const auto& cog = own_best_pos[l];
            for (std::size_t m = 0; m < x.size(); ++m) {
                const double g_c = unit(engine);
                const double g_s = unit(engine);
                const double xm = x[m];
                v[m] = params.inertia * v[m] + params.cognitive * g_c * (cog[m] - xm) +
                       params.social * g_s * (best_mask[m] - xm);
                x[m] = (xm + v[m] > 0.5) ? 1 : 0;
            }
        }
        bool improved = false;
        for (std::size_t l = 0; l < pos.size(); ++l) {
            const double e = objective(pos[l]);
            if (e > own_best[l]) {
                own_best[l] = e;
                own_best_pos[l] = pos[l];
                if (e > best) {
                    best = e;
                    best_mask = pos[l];
                    improved = true;
                }
            }
        }
        ++r.iterations;
        stall = improved ? 0 : stall + 1;
        r.trace.push_back(best);
    }

    r.active = ActiveSet::from_mask(best_mask);
    r.raw_ee = best;
    r.flops_spent = flop_cost(FlopKind::as_pso, {.users = objective.users(), .antennas = total,
                                                 .mean_iterations = static_cast<double>(r.iterations),
                                                 .pso_swarm = swarm});
    r.ee = objective.evaluate(r.active, r.flops_spent);
    return r;
}

/// Runs `kind` from an HRNP start of `count` antennas. Selector::none returns
/// the full array with no selection cost charged.
inline SelectionResult run_selector(Selector kind, const EeObjective& objective, int count,
                                    const HeuristicParams& params, std::uint64_t seed)
{
    if (kind == Selector::none) {
        SelectionResult r;
        r.active = ActiveSet::full(objective.antennas());
        r.raw_ee = objective.evaluate(r.active, objective.hrnp_cost());
        r.ee = objective.evaluate_without_selection(r.active);
        return r;
    }
    if (kind == Selector::hrnp)
        return hrnp_result(objective, count);
    const ActiveSet init = hrnp_select(objective.fading(), count);
    switch (kind) {
    case Selector::ls: return ls_select(init, params, objective, seed);
    case Selector::ga: return ga_select(init, params, objective, seed);
    case Selector::pso: return pso_select(init, params, objective, seed);
    default: break;
    }
    throw ConfigError("run_selector: unknown selector");
}

} // namespace xlmimo

#endif
