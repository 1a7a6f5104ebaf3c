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
#include "hqf/qsim/circuit.hpp"

#include <cstdio>

#include "hqf/tensor/error.hpp"

namespace hqf::qsim {

std::string_view gate_name(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::H:
        return "H";
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::CNOT:
        return "CNOT";
    }
    return "?";
}

bool is_rotation(GateKind kind) noexcept {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

void CircuitSpec::validate() const {
    if (n_qubits < 1 || n_qubits > 16) {
        throw ValueError("CircuitSpec: n_qubits must lie in [1, 16], got " +
                         std::to_string(n_qubits));
    }
    std::vector<bool> used(n_trainable, false);
    for (std::size_t g = 0; g < gates.size(); ++g) {
        const GateOp &op = gates[g];
        const std::string where = "CircuitSpec gate " + std::to_string(g) + " (" +
                                  std::string(gate_name(op.kind)) + ")";
        for (std::size_t w = 0; w < op.wire_count(); ++w) {
            if (op.wires[w] >= n_qubits) {
                throw ValueError(where + ": wire " + std::to_string(op.wires[w]) +
                                 " >= n_qubits");
            }
        }
        if (op.kind == GateKind::CNOT && op.wires[0] == op.wires[1]) {
            throw ValueError(where + ": control and target coincide");
        }
        if (is_rotation(op.kind)) {
            if (op.slot.has_value() == op.fixed_angle.has_value()) {
                throw ValueError(where +
                                 ": rotation needs exactly one of slot / angle");
            }
            if (op.slot) {
                const std::size_t limit = op.slot->source == SlotSource::Trainable
                                              ? n_trainable
                                              : n_inputs;
                if (op.slot->index >= limit) {
                    throw ValueError(where + ": slot index out of range");
                }
                if (op.slot->source == SlotSource::Trainable) {
                    used[op.slot->index] = true;
                }
            }
        } else if (op.slot || op.fixed_angle) {
            throw ValueError(where + ": gate takes no parameter");
        }
    }
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (!used[i]) {
            throw ValueError("CircuitSpec: trainable slot " + std::to_string(i) +
                             " is never referenced");
        }
    }
}

std::vector<double> resolve_angles(const CircuitSpec &spec,
                                   std::span<const double> trainable,
                                   std::span<const double> inputs) {
    if (trainable.size() != spec.n_trainable) {
        throw ValueError("run_circuit: expected " +
                         std::to_string(spec.n_trainable) +
                         " trainable angles, got " +
                         std::to_string(trainable.size()));
    }
    if (inputs.size() != spec.n_inputs) {
        throw ValueError("run_circuit: expected " + std::to_string(spec.n_inputs) +
                         " input angles, got " + std::to_string(inputs.size()));
    }
    std::vector<double> angles(spec.gates.size(), 0.0);
    for (std::size_t g = 0; g < spec.gates.size(); ++g) {
        const GateOp &op = spec.gates[g];
        if (op.fixed_angle) {
            angles[g] = *op.fixed_angle;
        } else if (op.slot) {
            angles[g] = op.slot->source == SlotSource::Trainable
                            ? trainable[op.slot->index]
                            : inputs[op.slot->index];
        }
    }
    return angles;
}

std::string dump_circuit(const CircuitSpec &spec) {
    std::string out;
    char buf[64];
    for (const GateOp &op : spec.gates) {
        out += gate_name(op.kind);
        out += ' ';
        out += std::to_string(op.wires[0]);
        if (op.wire_count() == 2) {
            out += ',';
            out += std::to_string(op.wires[1]);
        }
        if (op.slot) {
            out += op.slot->source == SlotSource::Trainable ? " slot:" : " input:";
            out += std::to_string(op.slot->index);
        } else if (op.fixed_angle) {
            std::snprintf(buf, sizeof(buf), " angle:%.17g", *op.fixed_angle);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace hqf::qsim
