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

#include <cstddef>
#include <span>
#include <vector>

#include "hqf/tensor/autodiff.hpp"

namespace hqf::train {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First and second moments for one parameter tensor.
struct AdamMoments {
    std::vector<double> m;
    std::vector<double> v;
};

/**
 * One bias-corrected Adam update of `param` in place; `step` is the
 * 1-based step number after increment.
 */
void adam_update(std::span<double> param, std::span<const double> grad, AdamMoments &moments,
                 const AdamConfig &cfg, std::size_t step);

/**
 * Adam over every tensor of a ParameterSet. Parameters that received no
 * gradient this step are treated as having a zero gradient.
 */
class Adam {
  public:
    Adam(ParameterSet &params, const AdamConfig &cfg);

    /// Checks every gradient for NaN/inf (NumericError naming the
    /// parameter), then updates all parameters and advances the step count.
    void step();
    [[nodiscard]] std::size_t steps() const noexcept { return step_; }
    [[nodiscard]] const AdamConfig &config() const noexcept { return cfg_; }

  private:
    ParameterSet &params_;
    AdamConfig cfg_;
    std::vector<AdamMoments> moments_;
    std::size_t step_ = 0;
};

} // namespace hqf::train
