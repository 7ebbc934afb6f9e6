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


#ifndef XLMIMO_GEOMETRY_HPP
#define XLMIMO_GEOMETRY_HPP

#include "error.hpp"
#include "random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace xlmimo {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Physical layout of the downlink scenario. Defaults reproduce the reference
/// deployment: a 30 m line array of 500 antennas serving 100 users.
struct ScenarioConfig {
    int num_antennas = 500;                              // M
    double array_length = 30.0;                          // L [m]
    int num_users = 100;                                 // K
    double path_loss_exponent = 3.0;                     // kappa
    double reference_gain = std::pow(10.0, -3.53);       // q, path gain at 1 m
    double noise_power = dbm_to_watts(-96.0);            // sigma^2 [W]
    double p_max = 0.23e-3;                              // total radiated DL power [W]
    std::optional<double> rho = 10.0;                    // target mean received SNR; overrides p_max when set
    double y_min_frac = 0.1;                             // user band, fractions of L
    double y_max_frac = 1.0;

    /// q * L^-kappa, the array-averaged path gain used to calibrate the SNR.
    double beta_avg() const { return reference_gain * std::pow(array_length, -path_loss_exponent); }

    /// Radiated power actually used: derived from rho when set, p_max otherwise.
    double transmit_power() const;

    /// Throws ConfigError on a violated invariant. zero_forcing additionally requires M >= K.
    void validate(bool zero_forcing = false) const
    {
        if (num_antennas < 1)
            throw ConfigError("num_antennas must be >= 1");
        if (num_users < 1)
            throw ConfigError("num_users must be >= 1");
        if (zero_forcing && num_antennas < num_users)
            throw ConfigError("zero-forcing needs num_antennas >= num_users");
        if (!(array_length > 0.0) || !(reference_gain > 0.0) || !(noise_power > 0.0))
            throw ConfigError("array_length, reference_gain and noise_power must be positive");
        if (!(path_loss_exponent >= 0.0))
            throw ConfigError("path_loss_exponent must be non-negative");
        if (!rho && !(p_max > 0.0))
            throw ConfigError("p_max must be positive");
        if (rho && !(*rho >= 0.0))
            throw ConfigError("rho must be non-negative");
        if (!(y_min_frac > 0.0) || !(y_min_frac < y_max_frac))
            throw ConfigError("user band needs 0 < y_min_frac < y_max_frac");
    }
};

/// P_max = rho * sigma^2 / beta_avg with beta_avg = q * L^-kappa.
inline double p_max_from_rho(const ScenarioConfig& cfg)
{
    if (!cfg.rho)
        throw ConfigError("p_max_from_rho: rho is not set");
    const double avg = cfg.beta_avg();
    if (!(avg > 0.0))
        throw ConfigError("p_max_from_rho: beta_avg is zero");
    return *cfg.rho * cfg.noise_power / avg;
}

inline double ScenarioConfig::transmit_power() const { return rho ? p_max_from_rho(*this) : p_max; }

/// Uniform line array centred at the origin along x.
struct ArrayGeometry {
    std::vector<double> positions; // antenna m (0-based) at (m + 1/2) * spacing - L/2
    double spacing = 0.0;          // dx = L / M

    static ArrayGeometry uniform(const ScenarioConfig& cfg)
    {
        ArrayGeometry g;
        g.spacing = cfg.array_length / cfg.num_antennas;
        g.positions.resize(static_cast<std::size_t>(cfg.num_antennas));
        for (int m = 0; m < cfg.num_antennas; ++m)
            g.positions[static_cast<std::size_t>(m)] = (m + 0.5) * g.spacing - cfg.array_length / 2.0;
        return g;
    }
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct UserPositions {
    std::vector<Point> coords;
};

/// K users i.i.d. uniform over [-L/2, L/2] x [y_min_frac L, y_max_frac L].
inline UserPositions place_users(const ScenarioConfig& cfg, std::uint64_t seed)
{
    auto engine = make_engine(seed, Stream::placement);
    std::uniform_real_distribution<double> ux(-cfg.array_length / 2.0, cfg.array_length / 2.0);
    std::uniform_real_distribution<double> uy(cfg.y_min_frac * cfg.array_length,
                                              cfg.y_max_frac * cfg.array_length);
    UserPositions users;
    users.coords.reserve(static_cast<std::size_t>(cfg.num_users));
    for (int k = 0; k < cfg.num_users; ++k) {
        const double x = ux(engine);
        const double y = uy(engine);
        users.coords.push_back({x, y});
    }
    return users;
}

/// Long-term path gains beta(m, k) = q * d(m, k)^-kappa, one row per antenna
/// and one column per user.
struct LongTermFadingMatrix {
    Eigen::MatrixXd beta;
    double beta_avg = 0.0;

    int antennas() const { return static_cast<int>(beta.rows()); }
    int users() const { return static_cast<int>(beta.cols()); }
    double operator()(int m, int k) const { return beta(m, k); }
};

inline constexpr double kMinDistance = 1e-3; // [m]

inline LongTermFadingMatrix long_term_fading(const ArrayGeometry& geom, const UserPositions& users,
                                             const ScenarioConfig& cfg)
{
    const auto m_count = static_cast<Eigen::Index>(geom.positions.size());
    const auto k_count = static_cast<Eigen::Index>(users.coords.size());
    LongTermFadingMatrix out;
    out.beta.resize(m_count, k_count);
    out.beta_avg = cfg.beta_avg();
    for (Eigen::Index k = 0; k < k_count; ++k) {
        const Point u = users.coords[static_cast<std::size_t>(k)];
        for (Eigen::Index m = 0; m < m_count; ++m) {
            const double d = std::hypot(geom.positions[static_cast<std::size_t>(m)] - u.x, u.y);
            if (d < kMinDistance)
                throw GeometryError("long_term_fading: user " + std::to_string(k) +
                                    " coincides with antenna " + std::to_string(m));
            out.beta(m, k) = cfg.reference_gain * std::pow(d, -cfg.path_loss_exponent);
        }
    }
    return out;
}

/// Small-scale channel H (M x K) with H(m, k) = sqrt(beta(m, k)) * CN(0, 1).
struct ChannelRealization {
    Eigen::MatrixXcd h;
};

inline ChannelRealization draw_channel(const LongTermFadingMatrix& lt, std::uint64_t seed)
{
    auto engine = make_engine(seed, Stream::fading);
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    ChannelRealization out;
    out.h.resize(lt.beta.rows(), lt.beta.cols());
    for (Eigen::Index k = 0; k < lt.beta.cols(); ++k)
        for (Eigen::Index m = 0; m < lt.beta.rows(); ++m) {
            const double re = n(engine);
            const double im = n(engine);
            out.h(m, k) = std::sqrt(lt.beta(m, k)) * std::complex<double>(re, im);
        }
    return out;
}

} // namespace xlmimo

#endif
