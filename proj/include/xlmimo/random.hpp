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

#ifndef XLMIMO_RANDOM_HPP
#define XLMIMO_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace xlmimo {

/// Named random substreams. Every random draw in the library is taken from an
/// engine seeded by derive_seed(master, stream, ...), so two consumers never
/// share a sequence.
enum class Stream : std::uint64_t {
    placement = 1,
    fading = 2,
    genetic = 3,
    swarm = 4,
    trial = 5,
    local_search = 6,
};

using Engine = std::mt19937_64;

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministically derive a child seed from a master seed, a stream tag and
/// any number of indices (grid point, trial, ...).
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::initializer_list<std::uint64_t> indices = {}) noexcept
{
    std::uint64_t h = detail::mix64(master ^ detail::mix64(static_cast<std::uint64_t>(stream)));
    for (auto i : indices)
        h = detail::mix64(h ^ detail::mix64(i + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine make_engine(std::uint64_t master, Stream stream,
                          std::initializer_list<std::uint64_t> indices = {})
{
    return Engine(derive_seed(master, stream, indices));
}

} // namespace xlmimo

#endif
