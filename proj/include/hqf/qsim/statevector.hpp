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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hqf/qsim/circuit.hpp"

namespace hqf::qsim {

using Complex = std::complex<double>;

/// Pauli operators used as observables or rotation generators.
enum class Pauli { X, Y, Z };

/**
 * @brief 2^n complex amplitudes, little-endian: qubit q is bit q of the
 * basis index.
 */
class Statevector {
  public:
    /// |0...0> on n qubits (1..16).
    explicit Statevector(std::size_t n_qubits);
    Statevector(std::size_t n_qubits, std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amps_; }
    [[nodiscard]] Complex operator[](std::size_t i) const noexcept {
        return amps_[i];
    }

    void apply_h(std::size_t wire);
    void apply_rx(std::size_t wire, double angle);
    void apply_ry(std::size_t wire, double angle);
    void apply_rz(std::size_t wire, double angle);
    void apply_cnot(std::size_t control, std::size_t target);
    void apply_pauli(Pauli pauli, std::size_t wire);

    /// Applies op with its resolved angle (ignored for H / CNOT).
    void apply(const GateOp &op, double angle);
    /// Applies the inverse of op.
    void apply_inverse(const GateOp &op, double angle);

    /// Compensated sum of |amp|^2.
    [[nodiscard]] double norm_squared() const;
    /// <this|other>.
    [[nodiscard]] Complex inner(const Statevector &other) const;
    /// <this| P_wire |other>, without materialising P|other>.
    [[nodiscard]] Complex pauli_inner(Pauli pauli, std::size_t wire,
                                      const Statevector &other) const;

  private:
    void check_wire(std::size_t wire) const;
    template <typename F> void for_each_pair(std::size_t wire, F &&f);

    std::size_t n_qubits_;
    std::vector<Complex> amps_;
};

struct Observable {
    Pauli kind = Pauli::Z;
    std::size_t wire = 0;
};

/// <psi|O|psi>, clamped into [-1, 1].
[[nodiscard]] double expectation(const Statevector &state, const Observable &obs);
[[nodiscard]] std::vector<double>
expectations(const Statevector &state, std::span<const Observable> observables);

/// Functional form: returns a copy with the gate applied. `angle` must be
/// supplied exactly when the gate is a rotation without a fixed angle.
[[nodiscard]] Statevector apply_gate(Statevector state, const GateOp &op,
                                     std::optional<double> angle = {});

/// Runs the circuit from |0...0> with slots resolved from the two vectors.
[[nodiscard]] Statevector run_circuit(const CircuitSpec &spec,
                                      std::span<const double> trainable,
                                      std::span<const double> inputs);

} // namespace hqf::qsim
