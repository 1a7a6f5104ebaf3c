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
 * Circuit families shared by the skip and bottleneck blocks, plus the angle
 * encoding and measurement conventions.
 *
 * Every builder returns a circuit that starts with the encoding layer
 * (RX, RY, RZ on each qubit, bound to input slots 3i, 3i+1, 3i+2) followed
 * by the trainable body.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hqf/qsim/statevector.hpp"
#include "hqf/tensor/random.hpp"

namespace hqf::circuits {

using qsim::CircuitSpec;
using qsim::GateOp;

/// Row-major qubit layout: 4x4 for 16 qubits, 2x4 for 8.
struct QubitGrid {
    std::size_t rows = 4;
    std::size_t cols = 4;

    /// Throws ValueError unless n_qubits is 8 or 16.
    static QubitGrid for_qubits(std::size_t n_qubits);

    [[nodiscard]] std::size_t size() const noexcept { return rows * cols; }
    [[nodiscard]] std::size_t index(std::size_t r, std::size_t c) const noexcept {
        return r * cols + c;
    }
};

/// Angles pi * z, one RX/RY/RZ triple per qubit (qubit i takes z[3i..3i+2]).
/// Throws ValueError when a component has |z| >= 1 or the length is wrong.
[[nodiscard]] std::vector<double> encoding_angles(std::span<const double> z,
                                                  std::size_t n_qubits);

/// Encoding with the angles baked in as fixed rotations.
[[nodiscard]] std::vector<GateOp> encode_features(std::span<const double> z,
                                                  std::size_t n_qubits);

/// The encoding layer bound to input slots 0 .. 3n-1.
[[nodiscard]] std::vector<GateOp> encoding_layer(std::size_t n_qubits);

/// RY(t0) w0, RY(t1) w1, CNOT w0->w1, RY(t2) w0, RY(t3) w1 with slots
/// slot_base .. slot_base+3.
[[nodiscard]] std::vector<GateOp> build_two_qubit_filter(std::size_t w0, std::size_t w1,
                                                         std::size_t slot_base);

/// Two-qubit circuit: encoding followed by one filter.
[[nodiscard]] CircuitSpec build_filter_circuit();
[[nodiscard]] CircuitSpec build_enrichment_multiscale(const QubitGrid &grid);
[[nodiscard]] CircuitSpec build_localist(const QubitGrid &grid);
[[nodiscard]] CircuitSpec build_globalist(const QubitGrid &grid);
[[nodiscard]] CircuitSpec build_diagonal(const QubitGrid &grid);

/// "enrichment", "localist", "globalist", "diagonal" or "filter".
[[nodiscard]] CircuitSpec build_by_name(const std::string &name, const QubitGrid &grid);
[[nodiscard]] const std::vector<std::string> &circuit_names();

/// Z on every qubit, then X on every qubit.
[[nodiscard]] std::vector<qsim::Observable> feature_observables(std::size_t n_qubits);
[[nodiscard]] std::vector<double> measure_features(const qsim::Statevector &state);

/// Uniform in [-0.1, 0.1].
[[nodiscard]] std::vector<double> init_parameters(std::size_t count, Rng &rng);

} // namespace hqf::circuits
