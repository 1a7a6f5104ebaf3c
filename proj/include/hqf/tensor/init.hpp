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

#include <cmath>
#include <cstddef>

#include "hqf/tensor/random.hpp"
#include "hqf/tensor/tensor.hpp"

namespace hqf::init {

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
inline Tensor fan_in_uniform(Shape shape, std::size_t fan_in, Rng &rng) {
    Tensor t(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto &v : t.data()) {
        v = rng.uniform(-bound, bound);
    }
    return t;
}

/// Uniform in [-sqrt(6/fan_in), sqrt(6/fan_in)], for layers followed by ReLU.
inline Tensor he_uniform(Shape shape, std::size_t fan_in, Rng &rng) {
    Tensor t(std::move(shape));
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto &v : t.data()) {
        v = rng.uniform(-bound, bound);
    }
    return t;
}

inline Tensor uniform(Shape shape, double bound, Rng &rng) {
    Tensor t(std::move(shape));
    for (auto &v : t.data()) {
        v = rng.uniform(-bound, bound);
    }
    return t;
}

} // namespace hqf::init
