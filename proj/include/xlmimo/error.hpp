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

#ifndef XLMIMO_ERROR_HPP
#define XLMIMO_ERROR_HPP

#include <stdexcept>
#include <string>

namespace xlmimo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration. kind() tells the failure classes apart.
class ConfigError : public Error {
public:
    enum class Kind { invalid_value, unknown_key, unit_violation, parse_failure };

    explicit ConfigError(const std::string& what, Kind kind = Kind::invalid_value) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Geometry that would make the path-loss model singular.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Gram matrix of the active channel is singular or too ill-conditioned to invert.
class RankDeficientError : public Error {
public:
    using Error::Error;
};

/// Problem dimensions make the request impossible (e.g. ZF with fewer antennas than users).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// The binomial expansion behind the analytic SINR has broken down (F1 <= 0).
class ApproximationError : public Error {
public:
    using Error::Error;
};

} // namespace xlmimo

#endif
