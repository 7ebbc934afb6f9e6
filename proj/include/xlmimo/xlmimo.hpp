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


#ifndef XLMIMO_XLMIMO_HPP
#define XLMIMO_XLMIMO_HPP

#include "active_set.hpp"
#include "analytic.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "geometry.hpp"
#include "power.hpp"
#include "precoding.hpp"
#include "random.hpp"
#include "selection.hpp"

#endif
