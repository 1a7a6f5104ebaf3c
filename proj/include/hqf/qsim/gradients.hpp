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
 * Gradients of Pauli expectation values with respect to every rotation
 * angle slot. Columns are ordered trainable slots first, then input slots.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hqf/qsim/statevector.hpp"

namespace hqf::qsim {

/// Dense row-major [n_observables x (n_trainable + n_inputs)] matrix.
struct Jacobian {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Jacobian(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const {
        return data[r * cols + c];
    }
};

/**
 * Adjoint-mode Jacobian: one forward run, then a single reverse sweep that
 * carries the state and one co-state per observable, undoing each gate.
 * For a rotation exp(-i t P / 2) at gate k the entry is
 * Im <lambda_k | P | psi_k>, with psi_k the state after gate k.
 */
[[nodiscard]] Jacobian adjoint_gradients(const CircuitSpec &spec,
                                         std::span<const double> trainable,
                                         std::span<const double> inputs,
                                         std::span<const Observable> observables);

/// Two shifted runs per parameterized gate: (E(t + pi/2) - E(t - pi/2)) / 2,
/// summed over every gate that references a slot.
[[nodiscard]] Jacobian
parameter_shift_gradients(const CircuitSpec &spec,
                          std::span<const double> trainable,
                          std::span<const double> inputs,
                          std::span<const Observable> observables);

struct VjpResult {
    std::vector<double> values;     ///< <O_j>
    std::vector<double> d_trainable; ///< sum_j c_j d<O_j>/d(trainable)
    std::vector<double> d_inputs;    ///< sum_j c_j d<O_j>/d(inputs)
};

/**
 * Vector-Jacobian product in one sweep with the single co-state
 * sum_j c_j O_j |psi>. This is what training uses.
 */
[[nodiscard]] VjpResult adjoint_vjp(const CircuitSpec &spec,
                                    std::span<const double> trainable,
                                    std::span<const double> inputs,
                                    std::span<const Observable> observables,
                                    std::span<const double> cotangent);

} // namespace hqf::qsim
