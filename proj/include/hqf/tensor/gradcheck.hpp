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
#include <functional>
#include <span>
#include <vector>

#include "hqf/tensor/autodiff.hpp"

namespace hqf {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Central difference (f(t + h e_i) - f(t - h e_i)) / 2h for each index
/// (every coordinate when `indices` is empty).
[[nodiscard]] std::vector<double>
central_difference(const ScalarFn &f, std::span<const double> theta,
                   double h = 1e-3, std::span<const std::size_t> indices = {});

struct FiniteDiffReport {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    std::vector<std::size_t> indices;
    std::vector<double> numeric;
};

/**
 * Compares `analytic` (full gradient of f at theta) against central
 * differences. Error per coordinate is |analytic - numeric| /
 * max(1, |numeric|). Throws NumericError if f is non-finite.
 */
[[nodiscard]] FiniteDiffReport
finite_diff_check(const ScalarFn &f, std::span<const double> theta,
                  std::span<const double> analytic, double h = 1e-3,
                  std::span<const std::size_t> indices = {});

/// Builds a single-element result from its inputs on the given tape.
using ScalarGraph = std::function<Var(Tape &, const std::vector<Var> &)>;

struct GraphCheckOptions {
    double h = 1e-3;
    /// 0 checks every coordinate; otherwise a seeded sample of this many
    /// coordinates across all inputs that require grad.
    std::size_t max_coords = 0;
    std::uint64_t seed = 0;
};

/// Tape gradients of `graph` against central differences, over every input
/// that requires grad. Returns the worst relative error.
[[nodiscard]] double check_graph_gradients(const ScalarGraph &graph,
                                           const std::vector<Var> &inputs,
                                           const GraphCheckOptions &options = {});

} // namespace hqf
