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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hqf::qsim {

enum class GateKind { H, RX, RY, RZ, CNOT };

[[nodiscard]] std::string_view gate_name(GateKind kind) noexcept;
[[nodiscard]] bool is_rotation(GateKind kind) noexcept;

/// Which angle vector a rotation's slot indexes.
enum class SlotSource { Trainable, Input };

struct ParamSlot {
    SlotSource source = SlotSource::Trainable;
    std::size_t index = 0;

    friend bool operator==(const ParamSlot &, const ParamSlot &) = default;
};

/**
 * One gate. Rotations carry exactly one of `slot` / `fixed_angle`;
 * H and CNOT carry neither. For CNOT, wires[0] is the control.
 */
struct GateOp {
    GateKind kind = GateKind::H;
    std::array<std::size_t, 2> wires{0, 0};
    std::optional<ParamSlot> slot;
    std::optional<double> fixed_angle;

    [[nodiscard]] std::size_t wire_count() const noexcept {
        return kind == GateKind::CNOT ? 2 : 1;
    }

    static GateOp h(std::size_t wire) { return {GateKind::H, {wire, wire}, {}, {}}; }
    static GateOp cnot(std::size_t control, std::size_t target) {
        return {GateKind::CNOT, {control, target}, {}, {}};
    }
    static GateOp trainable(GateKind kind, std::size_t wire, std::size_t slot) {
        return {kind, {wire, wire}, ParamSlot{SlotSource::Trainable, slot}, {}};
    }
    static GateOp input(GateKind kind, std::size_t wire, std::size_t slot) {
        return {kind, {wire, wire}, ParamSlot{SlotSource::Input, slot}, {}};
    }
    static GateOp fixed(GateKind kind, std::size_t wire, double angle) {
        return {kind, {wire, wire}, {}, angle};
    }

    friend bool operator==(const GateOp &, const GateOp &) = default;
};

/// Ordered gate list over `n_qubits` with two angle vectors: `n_trainable`
/// circuit weights and `n_inputs` encoding angles.
struct CircuitSpec {
    std::size_t n_qubits = 0;
    std::vector<GateOp> gates;
    std::size_t n_trainable = 0;
    std::size_t n_inputs = 0;

    /// Throws ValueError when any structural invariant fails.
    void validate() const;

    friend bool operator==(const CircuitSpec &, const CircuitSpec &) = default;
};

/// Resolves every gate's angle (0 for H / CNOT). Throws on length mismatch.
[[nodiscard]] std::vector<double>
resolve_angles(const CircuitSpec &spec, std::span<const double> trainable,
               std::span<const double> inputs);

/**
 * Text dump: one gate per line, `KIND w[,w]` plus ` slot:k` (trainable
 * weight), ` input:k` (encoding angle) or ` angle:v` (fixed, %.17g).
 */
[[nodiscard]] std::string dump_circuit(const CircuitSpec &spec);

} // namespace hqf::qsim
