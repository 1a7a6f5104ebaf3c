// Copyright 2026 The HQF-Net Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <vector>

#include "hqf/tensor/autodiff.hpp"
#include "hqf/tensor/random.hpp"

namespace hqf::testing {

inline Tensor random_tensor(Rng &rng, Shape shape, double lo = -1.0,
                            double hi = 1.0) {
    Tensor t(std::move(shape));
    for (auto &v : t.data()) {
        v = rng.uniform(lo, hi);
    }
    return t;
}

inline Var random_param(Rng &rng, Shape shape, double lo = -1.0, double hi = 1.0) {
    return Var(random_tensor(rng, std::move(shape), lo, hi), true);
}

/// Values with magnitude in [gap, 1], random sign. Keeps relu away from its kink.
inline Tensor away_from_zero(Rng &rng, Shape shape, double gap = 0.05) {
    Tensor t(std::move(shape));
    for (auto &v : t.data()) {
        const double m = rng.uniform(gap, 1.0);
        v = rng.uniform() < 0.5 ? -m : m;
    }
    return t;
}

/// Normalized coordinate whose pixel position sits at least `margin` away
/// from an integer, so bilinear weights are smooth under small probes.
inline double smooth_coord(Rng &rng, std::size_t extent, double margin = 0.05) {
    const double px = static_cast<double>(rng.below(extent + 1)) - 1.0 +
                      rng.uniform(margin, 1.0 - margin);
    return (2.0 * px + 1.0) / static_cast<double>(extent) - 1.0;
}

} // namespace hqf::testing
