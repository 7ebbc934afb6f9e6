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


#ifndef XLMIMO_PRECODING_HPP
#define XLMIMO_PRECODING_HPP

#include "active_set.hpp"
#include "error.hpp"
#include "geometry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

namespace xlmimo {

enum class Precoder { cb, zf };

inline std::string_view to_string(Precoder p) { return p == Precoder::cb ? "cb" : "zf"; }

/// Precoding matrix G (columns g_k) with unit scaling and the per-user power
/// coefficients p_k of a uniform allocation, sum_k p_k ||g_k||^2 = P_max.
struct PrecodingResult {
    Eigen::MatrixXcd g;
    Eigen::VectorXd p;
};

/// Per-user SINRs with their spectral efficiencies log2(1 + gamma).
struct SinrReport {
    std::vector<double> sinr;
    std::vector<double> se;
    double sum_se = 0.0;
    bool clamped = false; // some deterministic-equivalent ZF SINR went negative and was set to 0
};

inline SinrReport make_sinr_report(std::vector<double> sinr, bool clamped = false)
{
    SinrReport r;
    r.se.reserve(sinr.size());
    for (double g : sinr) {
        r.se.push_back(std::log2(1.0 + g));
        r.sum_se += r.se.back();
    }
    r.sinr = std::move(sinr);
    r.clamped = clamped;
    return r;
}

inline double sum_se(const SinrReport& report)
{
    double s = 0.0;
    for (double g : report.sinr)
        s += std::log2(1.0 + g);
    return s;
}

inline constexpr double kMaxGramCondition = 1e12;

inline PrecodingResult precode(Precoder kind, const Eigen::MatrixXcd& h_active, double p_max)
{
    const auto k_count = h_active.cols();
    const auto m_count = h_active.rows();
    if (k_count == 0)
        throw InfeasibleError("precode: no users");
    PrecodingResult out;
    out.p.resize(k_count);
    const double per_user = p_max / static_cast<double>(k_count);

    if (kind == Precoder::cb) {
        out.g = h_active;
        for (Eigen::Index k = 0; k < k_count; ++k) {
            const double norm2 = h_active.col(k).squaredNorm();
            if (!(norm2 > 0.0))
                throw RankDeficientError("precode: user " + std::to_string(k) + " has an all-zero channel");
            out.p(k) = per_user / norm2;
        }
        return out;
    }

    if (m_count < k_count)
        throw InfeasibleError("precode: zero-forcing needs at least as many active antennas (" +
                              std::to_string(m_count) + ") as users (" + std::to_string(k_count) + ")");
    const Eigen::MatrixXcd gram = h_active.adjoint() * h_active;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxGramCondition)
        throw RankDeficientError("precode: Gram matrix is singular or ill-conditioned");
    const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    const Eigen::MatrixXcd inv = llt.solve(Eigen::MatrixXcd::Identity(k_count, k_count));
    out.g = h_active * inv;
    for (Eigen::Index k = 0; k < k_count; ++k)
        out.p(k) = per_user / inv(k, k).real();
    return out;
}

/// gamma_k = p_k |h_k^H g_k|^2 / (sum_{j != k} p_j |h_k^H g_j|^2 + sigma^2).
inline SinrReport instantaneous_sinr(const Eigen::MatrixXcd& h_active, const PrecodingResult& result,
                                     double sigma2)
{
    const Eigen::MatrixXcd cross = h_active.adjoint() * result.g; // (k, j) = h_k^H g_j
    const auto k_count = cross.rows();
    std::vector<double> sinr(static_cast<std::size_t>(k_count));
    for (Eigen::Index k = 0; k < k_count; ++k) {
        double interference = 0.0;
        for (Eigen::Index j = 0; j < k_count; ++j)
            if (j != k)
                interference += result.p(j) * std::norm(cross(k, j));
        sinr[static_cast<std::size_t>(k)] = result.p(k) * std::norm(cross(k, k)) / (interference + sigma2);
    }
    return make_sinr_report(std::move(sinr));
}

namespace detail {

// Deterministic-equivalent SINRs over the antennas in `active`, in O(|A| K).
// The cross term sum_{j != k} sum_m b(m,k) b(m,j) / s_j is regrouped as
// sum_m b(m,k) (w_m - b(m,k) / s_k) with w_m = sum_j b(m,j) / s_j.
// Returns true when a ZF bracket was negative and clamped to zero.
inline bool det_sinr_into(Precoder kind, const Eigen::MatrixXd& beta, std::span<const int> active,
                          double p_max, double sigma2, std::vector<double>& sinr,
                          std::vector<double>& col_sum, std::vector<double>& weight)
{
    const auto k_count = static_cast<std::size_t>(beta.cols());
    col_sum.assign(k_count, 0.0);
    weight.assign(active.size(), 0.0);
    sinr.assign(k_count, 0.0);
    for (std::size_t k = 0; k < k_count; ++k) {
        const double* col = beta.col(static_cast<Eigen::Index>(k)).data();
        double s = 0.0;
        for (int m : active)
            s += col[m];
        col_sum[k] = s;
    }
    for (std::size_t k = 0; k < k_count; ++k) {
        const double* col = beta.col(static_cast<Eigen::Index>(k)).data();
        const double inv = 1.0 / col_sum[k];
        for (std::size_t i = 0; i < active.size(); ++i)
            weight[i] += col[active[i]] * inv;
    }
    const double kf = static_cast<double>(k_count);
    bool clamped = false;
    for (std::size_t k = 0; k < k_count; ++k) {
        const double* col = beta.col(static_cast<Eigen::Index>(k)).data();
        const double inv = 1.0 / col_sum[k];
        double cross = 0.0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const double b = col[active[i]];
            cross += b * (weight[i] - b * inv);
        }
        if (kind == Precoder::cb) {
            sinr[k] = col_sum[k] / (cross + kf * sigma2 / p_max);
        } else {
            const double bracket = col_sum[k] - cross;
            if (bracket < 0.0) {
                clamped = true;
                sinr[k] = 0.0;
            } else {
                sinr[k] = p_max / (kf * sigma2) * bracket;
            }
        }
    }
    return clamped;
}

} // namespace detail

/// Deterministic-equivalent SINRs restricted to the active antennas, with the
/// uniform power allocation folded in. Negative ZF brackets are clamped to 0
/// and reported through SinrReport::clamped.
inline SinrReport det_sinr(Precoder kind, const LongTermFadingMatrix& lt, const ActiveSet& active,
                           double p_max, double sigma2)
{
    if (active.empty())
        throw InfeasibleError("det_sinr: empty active set");
    if (active.total_antennas() != lt.antennas())
        throw ConfigError("det_sinr: active set and long-term fading disagree on M");
    std::vector<double> sinr;
    std::vector<double> col_sum;
    std::vector<double> weight;
    const bool clamped = detail::det_sinr_into(kind, lt.beta, active.indices(), p_max, sigma2, sinr, col_sum, weight);
    return make_sinr_report(std::move(sinr), clamped);
}

/// Rows of H for the active antennas.
inline Eigen::MatrixXcd restrict_rows(const Eigen::MatrixXcd& h, const ActiveSet& active)
{
    Eigen::MatrixXcd out(active.size(), h.cols());
    for (int i = 0; i < active.size(); ++i)
        out.row(i) = h.row(active.indices()[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace xlmimo

#endif
