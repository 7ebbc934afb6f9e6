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


#ifndef XLMIMO_ANALYTIC_HPP
#define XLMIMO_ANALYTIC_HPP

#include "error.hpp"
#include "geometry.hpp"
#include "power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace xlmimo {

/// Closed-form EE model for ZF with HRNP selection, every user placed at the
/// centre of the coverage band facing the array centre.
///
/// With r = kappa dx^2 / y^2 the sums over the Ms closest antennas expand to
///   F1(Ms) = t11 Ms - t12 Ms^2 - t13 Ms^3   (first-order path gain sum)
///   F2(Ms) = t21 Ms - t22 Ms^2 - t23 Ms^3   (squared path gain sum)
/// and the per-user SINR is prefactor * (F1 - (K - 1) F2 / F1).
struct UmepModel {
    double y = 0.0;  // user distance to the array [m]
    double dx = 0.0; // antenna spacing [m]
    double t11 = 0.0, t12 = 0.0, t13 = 0.0;
    double t21 = 0.0, t22 = 0.0, t23 = 0.0;
    double prefactor = 0.0; // P_max q y^-kappa / (K sigma^2)
    double t0 = 0.0;        // power independent of Ms [W]
    double t1 = 0.0;        // power per active antenna [W]
    double p_bc = 0.0;      // coding + decoding + backhaul density [W per bit/s]

    int users = 0;
    int antennas = 0;
    double kappa = 0.0;
    double bandwidth = 0.0;
};

inline UmepModel build_umep(const ScenarioConfig& cfg, const PowerParams& pp)
{
    cfg.validate();
    pp.validate(cfg.num_users);
    UmepModel u;
    u.users = cfg.num_users;
    u.antennas = cfg.num_antennas;
    u.kappa = cfg.path_loss_exponent;
    u.bandwidth = pp.bandwidth;
    u.y = 0.5 * (cfg.y_min_frac + cfg.y_max_frac) * cfg.array_length;
    u.dx = cfg.array_length / cfg.num_antennas;

    const double r = u.kappa * u.dx * u.dx / (u.y * u.y);
    u.t11 = 1.0 - r / 12.0;
    u.t12 = r / 8.0;
    u.t13 = r / 24.0;
    u.t21 = 1.0 - r / 6.0;
    u.t22 = r / 4.0;
    u.t23 = r / 12.0;

    u.prefactor = cfg.transmit_power() * cfg.reference_gain * std::pow(u.y, -u.kappa) /
                  (cfg.num_users * cfg.noise_power);

    const double k = cfg.num_users;
    const double m = cfg.num_antennas;
    const double b = pp.bandwidth;
    const double s = pp.coherence_block;
    const double lbs = pp.computational_efficiency;
    const double tau = pp.tau(cfg.num_users);
    const double p_dagger = power_breakdown(cfg, pp, 0.0, 0.0, 0.0, false).p_dagger;

    u.t0 = p_dagger + (3.0 * m * k + m * std::log(m)) / (pp.long_term_coherence * lbs) +
           b * k * k * k / (3.0 * s * lbs);
    // ZF precoding (3 B K^2) and pilot correlation (2 B tau K) per coherence block;
    // with tau = K these merge into the 5 B K^2 / (S L_bs) term.
    u.t1 = pp.p_bs + (3.0 * b * k * k + 2.0 * b * tau * k) / (s * lbs) + (1.0 - tau / s) * 2.0 * b * k / lbs +
           b * k / (s * lbs);
    u.p_bc = pp.p_cod + pp.p_dec + pp.p_bt;
    return u;
}

struct ZfMeValue {
    double sinr = 0.0;
    int active = 0;         // Ms actually used (rounded up to even)
    bool rounded_up = false;
};

/// Exact-sum UMEP SINR over the Ms antennas closest to the array centre,
/// Ms/2 on each side at offsets m dx, m = 1..Ms/2.
inline ZfMeValue sinr_zf_me(int active, const UmepModel& u)
{
    ZfMeValue out;
    out.active = active;
    if (active % 2 != 0) {
        ++out.active;
        out.rounded_up = true;
    }
    if (out.active < 2 || out.active > std::max(2, u.antennas + (u.antennas % 2)))
        throw ConfigError("sinr_zf_me: Ms = " + std::to_string(active) + " outside [2, M]");
    double first = 0.0;
    double second = 0.0;
    for (int m = 1; m <= out.active / 2; ++m) {
        const double ratio = m * u.dx / u.y;
        const double base = 1.0 + ratio * ratio;
        first += std::pow(base, -u.kappa / 2.0);
        second += std::pow(base, -u.kappa);
    }
    first *= 2.0;
    second *= 2.0;
    out.sinr = u.prefactor * (first - (u.users - 1) * second / first);
    return out;
}

struct Polynomials {
    double f1, f2;   // path-gain sums
    double d1, d2;   // first derivatives
    double dd1, dd2; // second derivatives
};

inline Polynomials umep_polynomials(double ms, const UmepModel& u)
{
    Polynomials p{};
    p.f1 = ms * (u.t11 - ms * (u.t12 + u.t13 * ms));
    p.f2 = ms * (u.t21 - ms * (u.t22 + u.t23 * ms));
    p.d1 = u.t11 - ms * (2.0 * u.t12 + 3.0 * u.t13 * ms);
    p.d2 = u.t21 - ms * (2.0 * u.t22 + 3.0 * u.t23 * ms);
    p.dd1 = -2.0 * u.t12 - 6.0 * u.t13 * ms;
    p.dd2 = -2.0 * u.t22 - 6.0 * u.t23 * ms;
    return p;
}

/// Binomial-approximation UMEP SINR, continuous in Ms.
inline double sinr_zf_ba(double ms, const UmepModel& u)
{
    if (!(ms > 0.0))
        throw ConfigError("sinr_zf_ba: Ms must be positive");
    const auto p = umep_polynomials(ms, u);
    if (!(p.f1 > 0.0))
        throw ApproximationError("sinr_zf_ba: binomial approximation broke down (F1 <= 0) at Ms = " +
                                 std::to_string(ms));
    return u.prefactor * (p.f1 - (u.users - 1) * p.f2 / p.f1);
}

/// Largest integer Ms with kappa Ms^2 dx^2 / (8 y^2) < threshold.
inline int validity_boundary(const UmepModel& u, double threshold = 0.25)
{
    if (!(threshold > 0.0))
        return 0;
    const double scale = u.kappa * u.dx * u.dx / (8.0 * u.y * u.y);
    if (!(scale > 0.0))
        return u.antennas;
    const double limit = std::sqrt(threshold / scale);
    auto n = static_cast<long long>(std::floor(limit));
    while (n > 0 && scale * static_cast<double>(n) * static_cast<double>(n) >= threshold)
        --n;
    return static_cast<int>(std::min<long long>(n, std::numeric_limits<int>::max()));
}

/// B K log2(1+g) / (p_bc B K log2(1+g) + t0 + t1 Ms) for a given per-user SINR.
/// Negative SINRs are treated as zero.
inline double ee_from_sinr(double sinr, double ms, const UmepModel& u)
{
    const double rate = u.bandwidth * u.users * std::log2(1.0 + std::max(0.0, sinr));
    return rate / (u.p_bc * rate + u.t0 + u.t1 * ms);
}

inline double ee_analytic(double ms, const UmepModel& u) { return ee_from_sinr(sinr_zf_ba(ms, u), ms, u); }

struct SinrDerivatives {
    double sinr = 0.0;
    double first = 0.0;
    double second = 0.0;
};

inline SinrDerivatives sinr_zf_ba_derivatives(double ms, const UmepModel& u)
{
    const auto p = umep_polynomials(ms, u);
    if (!(p.f1 > 0.0))
        throw ApproximationError("sinr_zf_ba_derivatives: F1 <= 0 at Ms = " + std::to_string(ms));
    const double kk = u.users - 1;
    const double f1sq = p.f1 * p.f1;
    const double w = p.f1 * p.d2 - p.f2 * p.d1;
    SinrDerivatives d;
    d.sinr = u.prefactor * (p.f1 - kk * p.f2 / p.f1);
    d.first = u.prefactor * (p.d1 - kk * w / f1sq);
    d.second = u.prefactor *
               (p.dd1 - kk * (f1sq * (p.f1 * p.dd2 - p.f2 * p.dd1) - 2.0 * w * p.f1 * p.d1) / (f1sq * f1sq));
    return d;
}

struct RootFunction {
    double f = 0.0;
    double fprime = 0.0;
};

/// f(Ms) = g'(Ms) - t1 (1+g) ln(1+g) / (t0 + t1 Ms), whose root is the
/// stationary point of ee_analytic, together with its exact derivative
///   f'(Ms) = g'' - [t1 D g' (1 + ln(1+g)) - t1^2 (1+g) ln(1+g)] / D^2,  D = t0 + t1 Ms.
inline RootFunction f_and_fprime(double ms, const UmepModel& u)
{
    const auto g = sinr_zf_ba_derivatives(ms, u);
    const double one_g = 1.0 + g.sinr;
    const double lg = std::log(one_g);
    const double den = u.t0 + u.t1 * ms;
    RootFunction out;
    out.f = g.first - u.t1 * one_g * lg / den;
    out.fprime = g.second - (u.t1 * den * g.first * (1.0 + lg) - u.t1 * u.t1 * one_g * lg) / (den * den);
    return out;
}

// Arithmetic per Newton step: six polynomial evaluations (30), SINR and its two
// derivatives (23), log and denominator (4), f (4), f' (11), update and
// convergence test (4), plus the final floor/ceil comparison at 24 per
// ee_analytic evaluation.
inline constexpr int kNewtonStepFlops = 79;
inline constexpr int kEeAnalyticFlops = 24;
inline constexpr int kBisectionStepFlops = 62;

struct NewtonResult {
    int ms_star = 0;
    int iterations = 0;
    double root = 0.0;
    bool at_boundary = false; // f has no sign change in [K, validity_boundary]
    bool used_bisection = false;
    int flops = 0;
};

/// Newton-Raphson on f over the continuous relaxation of Ms, iterates clamped
/// to [K, validity_boundary]. Falls back to bisection when an iterate leaves
/// the interval or f' is unusable. The real root is resolved to whichever of
/// its floor and ceiling has the larger ee_analytic.
inline NewtonResult optimal_ms_newton(const UmepModel& u, std::optional<double> start = std::nullopt,
                                      double tol = 0.5, int max_iter = 20)
{
    const double lo = u.users;
    const double hi = validity_boundary(u);
    if (hi < lo)
        throw InfeasibleError("optimal_ms_newton: validity boundary " + std::to_string(hi) +
                              " lies below K = " + std::to_string(u.users));

    NewtonResult out;
    const auto resolve = [&](double root) {
        const double a = std::clamp(std::floor(root), lo, hi);
        const double b = std::clamp(std::ceil(root), lo, hi);
        out.root = root;
        out.ms_star = static_cast<int>(ee_analytic(b, u) > ee_analytic(a, u) ? b : a);
        out.flops += 2 * kEeAnalyticFlops;
        return out;
    };

    double x = std::clamp(start.value_or(1.5 * u.users), lo, hi);
    for (int it = 0; it < max_iter; ++it) {
        const auto r = f_and_fprime(x, u);
        out.flops += kNewtonStepFlops;
        if (!(std::isfinite(r.fprime) && std::abs(r.fprime) > 1e-300))
            break;
        const double next = x - r.f / r.fprime;
        ++out.iterations;
        if (!std::isfinite(next) || next < lo || next > hi)
            break;
        const double step = std::abs(next - x);
        x = next;
        if (step < tol) {
            // A root where f' >= 0 is an EE minimum, not the optimum.
            out.flops += kNewtonStepFlops;
            if (f_and_fprime(x, u).fprime < 0.0)
                return resolve(x);
            break;
        }
    }

    out.used_bisection = true;
    const double f_lo = f_and_fprime(lo, u).f;
    const double f_hi = f_and_fprime(hi, u).f;
    out.flops += 2 * kBisectionStepFlops;
    if (f_lo <= 0.0 || f_hi >= 0.0) {
        out.at_boundary = true;
        const double edge = ee_analytic(lo, u) >= ee_analytic(hi, u) ? lo : hi;
        out.flops += 2 * kEeAnalyticFlops;
        out.root = edge;
        out.ms_star = static_cast<int>(edge);
        return out;
    }
    double a = lo;
    double b = hi;
    while (b - a >= tol) {
        const double mid = 0.5 * (a + b);
        (f_and_fprime(mid, u).f > 0.0 ? a : b) = mid;
        out.flops += kBisectionStepFlops;
        ++out.iterations;
    }
    return resolve(0.5 * (a + b));
}

} // namespace xlmimo

#endif
