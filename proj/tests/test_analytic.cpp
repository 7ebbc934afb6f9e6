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


#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace xlmimo {
namespace {

using test::rel;

UmepModel reference(int users = 100)
{
    ScenarioConfig cfg;
    cfg.num_users = users;
    return build_umep(cfg, PowerParams{});
}

UmepModel flat_geometry()
{
    auto u = reference();
    u.dx = 0.0;
    u.t11 = u.t21 = 1.0;
    u.t12 = u.t13 = u.t22 = u.t23 = 0.0;
    return u;
}

TEST(Umep, ReferenceGeometry)
{
    const auto u = reference();
    EXPECT_NEAR(u.y, 16.5, 1e-12);
    EXPECT_NEAR(u.dx, 0.06, 1e-15);
    EXPECT_NEAR(u.t1, 1.548, 0.001);
    EXPECT_GT(u.t1, 0.0);
}

TEST(Umep, CoefficientIdentities)
{
    for (double kappa : {0.5, 2.0, 3.0, 4.2})
        for (int m : {64, 500, 1000}) {
            ScenarioConfig cfg;
            cfg.path_loss_exponent = kappa;
            cfg.num_antennas = m;
            const auto u = build_umep(cfg, PowerParams{});
            const double r = kappa * u.dx * u.dx / (u.y * u.y);
            EXPECT_DOUBLE_EQ(u.t11, 1.0 - r / 12.0);
            EXPECT_DOUBLE_EQ(u.t12, r / 8.0);
            EXPECT_DOUBLE_EQ(u.t13, r / 24.0);
            EXPECT_DOUBLE_EQ(u.t21, 1.0 - r / 6.0);
            EXPECT_DOUBLE_EQ(u.t22, r / 4.0);
            EXPECT_DOUBLE_EQ(u.t23, r / 12.0);
        }
}

TEST(Umep, ZeroExponent)
{
    ScenarioConfig cfg;
    cfg.path_loss_exponent = 0.0;
    const auto u = build_umep(cfg, PowerParams{});
    EXPECT_EQ(u.t11, 1.0);
    EXPECT_EQ(u.t21, 1.0);
    EXPECT_EQ(u.t12 + u.t13 + u.t22 + u.t23, 0.0);
}

TEST(ZfMe, SingleUserHasNoInterference)
{
    const auto u = reference(1);
    double sum = 0.0;
    for (int m = 1; m <= 20; ++m)
        sum += std::pow(1.0 + std::pow(m * u.dx / u.y, 2.0), -1.5);
    EXPECT_LT(rel(sinr_zf_me(40, u).sinr, u.prefactor * 2.0 * sum), 1e-13);
}

TEST(ZfMe, FlatGeometry)
{
    const auto u = flat_geometry();
    EXPECT_LT(rel(sinr_zf_me(146, u).sinr, u.prefactor * (146 - 99)), 1e-12);
    EXPECT_LT(rel(sinr_zf_ba(146, u), u.prefactor * (146 - 99)), 1e-12);
}

TEST(ZfMe, ReferencePointAndOddRounding)
{
    const auto u = reference();
    EXPECT_NEAR(sinr_zf_me(146, u).sinr, 27.3, 0.15);
    const auto odd = sinr_zf_me(145, u);
    EXPECT_TRUE(odd.rounded_up);
    EXPECT_EQ(odd.active, 146);
    EXPECT_EQ(odd.sinr, sinr_zf_me(146, u).sinr);
    EXPECT_THROW(sinr_zf_me(0, u), ConfigError);
}

TEST(ZfBa, ReferencePoint)
{
    const auto u = reference();
    const auto p = umep_polynomials(146, u);
    EXPECT_NEAR(p.f1, 140.8, 0.1);
    EXPECT_NEAR(p.f2, 135.5, 0.1);
    EXPECT_NEAR(sinr_zf_ba(146, u), 27.3, 0.15);
    EXPECT_LT(rel(sinr_zf_ba(146, u), sinr_zf_me(146, u).sinr), 0.02);
}

TEST(ZfBa, BreakdownThrows)
{
    const auto u = reference();
    EXPECT_THROW(sinr_zf_ba(5000, u), ApproximationError);
    EXPECT_THROW(sinr_zf_ba(0.0, u), ConfigError);
}

TEST(ZfBa, AgreesWithExactSumInsideValidity)
{
    const auto u = reference();
    const int limit = validity_boundary(u);
    for (int ms = 110; ms <= limit; ms += 2)
        EXPECT_LT(rel(sinr_zf_ba(ms, u), sinr_zf_me(ms, u).sinr), 0.05) << ms;
}

TEST(Validity, Boundary)
{
    auto u = reference();
    EXPECT_EQ(validity_boundary(u), 224);
    EXPECT_EQ(validity_boundary(u, 0.0), 0);
    const int base = validity_boundary(u, 0.1);
    u.y *= 2.0;
    EXPECT_LE(std::abs(validity_boundary(u, 0.1) - 2 * base), 1);
    u.kappa = 0.0;
    EXPECT_EQ(validity_boundary(u), u.antennas);
}

TEST(EeAnalytic, Examples)
{
    const auto u = reference();
    EXPECT_EQ(ee_from_sinr(0.0, 146, u), 0.0);
    EXPECT_LT(rel(ee_analytic(146, u), 34.85e6), 0.10);
    EXPECT_LT(ee_analytic(224, u), ee_analytic(180, u));
    EXPECT_LT(ee_analytic(180, u), ee_analytic(146, u));
}

TEST(Derivatives, MatchFiniteDifferences)
{
    const auto u = reference();
    const double h = 1e-3;
    for (double ms = 100; ms <= 224; ms += 7.5) {
        const auto d = sinr_zf_ba_derivatives(ms, u);
        const double fd1 = (sinr_zf_ba(ms + h, u) - sinr_zf_ba(ms - h, u)) / (2 * h);
        const double fd2 = (sinr_zf_ba_derivatives(ms + h, u).first - sinr_zf_ba_derivatives(ms - h, u).first) / (2 * h);
        EXPECT_LT(rel(d.first, fd1), 1e-6) << ms;
        EXPECT_LT(rel(d.second, fd2), 1e-5) << ms;
        const auto f = f_and_fprime(ms, u);
        const double fdf = (f_and_fprime(ms + h, u).f - f_and_fprime(ms - h, u).f) / (2 * h);
        EXPECT_LT(rel(f.fprime, fdf), 1e-5) << ms;
    }
}

TEST(Derivatives, RootFunctionIsEeGradientSign)
{
    const auto u = reference();
    for (double ms = 110; ms <= 220; ms += 10) {
        const double grad = (ee_analytic(ms + 1e-3, u) - ee_analytic(ms - 1e-3, u)) / 2e-3;
        EXPECT_EQ(std::signbit(grad), std::signbit(f_and_fprime(ms, u).f)) << ms;
    }
}

TEST(Newton, ReferenceOptimum)
{
    const auto u = reference();
    const auto r = optimal_ms_newton(u, 150.0);
    EXPECT_EQ(r.ms_star, 146);
    EXPECT_LE(r.iterations, 3);
    EXPECT_FALSE(r.used_bisection);
    EXPECT_FALSE(r.at_boundary);
    EXPECT_LE(r.flops, 500);
    for (int ms = 100; ms <= validity_boundary(u); ++ms)
        EXPECT_GE(ee_analytic(r.ms_star, u), ee_analytic(ms, u)) << ms;
}

TEST(Newton, ZeroCrossingBracketsGridArgmax)
{
    const auto u = reference();
    const int star = optimal_ms_newton(u).ms_star;
    const double lo = f_and_fprime(star - 1, u).f;
    const double hi = f_and_fprime(star + 1, u).f;
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi, 0.0);
}

TEST(Newton, FixedPoint)
{
    const auto u = reference();
    const auto r = optimal_ms_newton(u, 150.0, 1e-9, 50);
    EXPECT_LT(std::abs(f_and_fprime(r.root, u).f), 1e-8 * std::abs(f_and_fprime(150.0, u).f));
}

TEST(Newton, OtherLoadsMatchGridSearch)
{
    for (int k : {50, 80, 120, 150}) {
        const auto u = reference(k);
        const auto r = optimal_ms_newton(u);
        int grid = k;
        for (int ms = k; ms <= validity_boundary(u); ++ms)
            if (ee_analytic(ms, u) > ee_analytic(grid, u))
                grid = ms;
        EXPECT_EQ(r.ms_star, grid) << k;
    }
}

TEST(Newton, BadStartFallsBackToBisection)
{
    const auto u = reference();
    const auto r = optimal_ms_newton(u, 224.0);
    EXPECT_EQ(r.ms_star, 146);
}

TEST(Newton, InfeasibleLoad)
{
    EXPECT_THROW(optimal_ms_newton(reference(300)), InfeasibleError);
}

} // namespace
} // namespace xlmimo
