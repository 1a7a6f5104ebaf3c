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
/**
 * @file
 * Module-by-module gradient oracles: circuit gradients three ways, layer
 * and block graphs against central differences, and the whole network.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hqf/segnet/config.hpp"

namespace hqf::train {

struct OracleResult {
    std::string name;
    double error = 0.0;
    double tolerance = 0.0;

    [[nodiscard]] bool passed() const noexcept { return error <= tolerance; }
};

/// Worst |adjoint - parameter shift| and |parameter shift - central
/// difference (h = 1e-5)| over all observables and slots of one builder.
struct CircuitGradientCheck {
    double adjoint_vs_shift = 0.0;
    double shift_vs_fd = 0.0;
};

[[nodiscard]] CircuitGradientCheck check_circuit_gradients(const std::string &builder,
                                                           std::size_t n_qubits,
                                                           std::uint64_t seed);

struct OracleOptions {
    std::size_t n_qubits = 8;
    /// Network profile for the whole-model check; sampled coordinates below.
    segnet::NetConfig network = segnet::NetConfig::toy();
    std::size_t network_coords = 50;
    std::uint64_t seed = 0;
};

/// Runs every oracle, reporting each through `on_result` as it finishes.
std::vector<OracleResult>
run_gradient_oracles(const OracleOptions &options,
                     const std::function<void(const OracleResult &)> &on_result = {});

/// Whole-network check alone: worst relative error over sampled parameters.
[[nodiscard]] double check_network_gradients(const segnet::NetConfig &cfg, std::size_t coords,
                                             std::uint64_t seed);

} // namespace hqf::train
