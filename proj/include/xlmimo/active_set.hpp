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


#ifndef XLMIMO_ACTIVE_SET_HPP
#define XLMIMO_ACTIVE_SET_HPP

#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace xlmimo {

/// Binary activation vector over the M antennas.
using Mask = std::vector<std::uint8_t>;

/// Subset of active antennas, stored as strictly increasing 0-based indices.
class ActiveSet {
public:
    ActiveSet() = default;

    /// Takes any index list; sorts it and rejects duplicates or out-of-range entries.
    ActiveSet(std::vector<int> indices, int total_antennas) : indices_(std::move(indices)), total_(total_antennas)
    {
        std::sort(indices_.begin(), indices_.end());
        if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
            throw ConfigError("ActiveSet: duplicate antenna index");
        if (!indices_.empty() && (indices_.front() < 0 || indices_.back() >= total_))
            throw ConfigError("ActiveSet: antenna index out of range [0, " + std::to_string(total_) + ")");
    }

    static ActiveSet from_mask(std::span<const std::uint8_t> mask)
    {
        ActiveSet s;
        s.total_ = static_cast<int>(mask.size());
        for (std::size_t m = 0; m < mask.size(); ++m)
            if (mask[m])
                s.indices_.push_back(static_cast<int>(m));
        return s;
    }

    static ActiveSet full(int total_antennas)
    {
        ActiveSet s;
        s.total_ = total_antennas;
        s.indices_.resize(static_cast<std::size_t>(total_antennas));
        for (int m = 0; m < total_antennas; ++m)
            s.indices_[static_cast<std::size_t>(m)] = m;
        return s;
    }

    Mask mask() const
    {
        Mask a(static_cast<std::size_t>(total_), 0);
        for (int m : indices_)
            a[static_cast<std::size_t>(m)] = 1;
        return a;
    }

    const std::vector<int>& indices() const { return indices_; }
    int size() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }
    int total_antennas() const { return total_; }
    bool contains(int m) const { return std::binary_search(indices_.begin(), indices_.end(), m); }

    friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

private:
    std::vector<int> indices_;
    int total_ = 0;
};

} // namespace xlmimo

#endif
