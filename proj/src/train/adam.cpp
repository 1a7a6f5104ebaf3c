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
#include "hqf/train/adam.hpp"

#include <cmath>

#include "hqf/tensor/error.hpp"

namespace hqf::train {

void adam_update(std::span<double> param, std::span<const double> grad, AdamMoments &moments,
                 const AdamConfig &cfg, std::size_t step) {
    if (grad.size() != param.size()) {
        throw DimensionError("adam_update", "gradient", param.size(), grad.size());
    }
    if (step == 0) {
        throw ValueError("adam_update: step numbers start at 1");
    }
    moments.m.resize(param.size(), 0.0);
    moments.v.resize(param.size(), 0.0);
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        moments.m[i] = cfg.beta1 * moments.m[i] + (1.0 - cfg.beta1) * g;
        moments.v[i] = cfg.beta2 * moments.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = moments.m[i] / c1;
        const double vhat = moments.v[i] / c2;
        param[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

Adam::Adam(ParameterSet &params, const AdamConfig &cfg)
    : params_(params), cfg_(cfg), moments_(params.items().size()) {
    if (!(cfg.lr > 0.0)) {
        throw ConfigError("Adam: learning rate must be positive");
    }
}

void Adam::step() {
    auto &items = params_.items();
    if (items.size() != moments_.size()) {
        throw ValueError("Adam: parameter set changed after construction");
    }
    for (const auto &item : items) {
        if (!item.var.has_grad()) {
            continue;
        }
        const auto g = item.var.grad().data();
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!std::isfinite(g[i])) {
                throw NumericError("non-finite gradient in parameter \"" + item.name +
                                   "\" at element " + std::to_string(i));
            }
        }
    }
    ++step_;
    std::vector<double> zeros;
    for (std::size_t k = 0; k < items.size(); ++k) {
        auto &item = items[k];
        auto value = item.var.mutable_value().data();
        if (item.var.has_grad()) {
            adam_update(value, item.var.grad().data(), moments_[k], cfg_, step_);
        } else {
            zeros.assign(value.size(), 0.0);
            adam_update(value, zeros, moments_[k], cfg_, step_);
        }
    }
}

} // namespace hqf::train
