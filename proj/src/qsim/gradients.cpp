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
#include "hqf/qsim/gradients.hpp"

#include <numbers>

#include "hqf/tensor/error.hpp"

namespace hqf::qsim {

namespace {

Pauli generator_of(GateKind kind) {
    switch (kind) {
    case GateKind::RX:
        return Pauli::X;
    case GateKind::RY:
        return Pauli::Y;
    case GateKind::RZ:
        return Pauli::Z;
    default:
        throw ValueError("adjoint: gate " + std::string(gate_name(kind)) +
                         " has no generator");
    }
}

std::size_t column_of(const CircuitSpec &spec, const ParamSlot &slot) {
    return slot.source == SlotSource::Trainable ? slot.index
                                                : spec.n_trainable + slot.index;
}

/// Index of the first gate that carries a slot, or gates.size().
std::size_t first_slot_gate(const CircuitSpec &spec) {
    for (std::size_t g = 0; g < spec.gates.size(); ++g) {
        if (spec.gates[g].slot) {
            return g;
        }
    }
    return spec.gates.size();
}

void check_observables(const CircuitSpec &spec,
                       std::span<const Observable> observables) {
    for (const auto &o : observables) {
        if (o.wire >= spec.n_qubits) {
            throw ValueError("observable wire out of range");
        }
    }
}

} // namespace

Jacobian adjoint_gradients(const CircuitSpec &spec,
                           std::span<const double> trainable,
                           std::span<const double> inputs,
                           std::span<const Observable> observables) {
    check_observables(spec, observables);
    const auto angles = resolve_angles(spec, trainable, inputs);
    Jacobian jac(observables.size(), spec.n_trainable + spec.n_inputs);

    Statevector psi(spec.n_qubits);
    for (std::size_t g = 0; g < spec.gates.size(); ++g) {
        psi.apply(spec.gates[g], angles[g]);
    }
    std::vector<Statevector> lambdas(observables.size(), psi);
    for (std::size_t j = 0; j < observables.size(); ++j) {
        lambdas[j].apply_pauli(observables[j].kind, observables[j].wire);
    }

    const std::size_t stop = first_slot_gate(spec);
    for (std::size_t g = spec.gates.size(); g-- > stop;) {
        const GateOp &op = spec.gates[g];
        if (op.slot) {
            const Pauli p = generator_of(op.kind);
            const std::size_t col = column_of(spec, *op.slot);
            for (std::size_t j = 0; j < observables.size(); ++j) {
                jac(j, col) += lambdas[j].pauli_inner(p, op.wires[0], psi).imag();
            }
        }
        if (g == stop) {
            break;
        }
        psi.apply_inverse(op, angles[g]);
        for (auto &l : lambdas) {
            l.apply_inverse(op, angles[g]);
        }
    }
    return jac;
}

Jacobian parameter_shift_gradients(const CircuitSpec &spec,
                                   std::span<const double> trainable,
                                   std::span<const double> inputs,
                                   std::span<const Observable> observables) {
    check_observables(spec, observables);
    auto angles = resolve_angles(spec, trainable, inputs);
    Jacobian jac(observables.size(), spec.n_trainable + spec.n_inputs);

    const auto run = [&](const std::vector<double> &a) {
        Statevector psi(spec.n_qubits);
        for (std::size_t g = 0; g < spec.gates.size(); ++g) {
            psi.apply(spec.gates[g], a[g]);
        }
        return expectations(psi, observables);
    };
    constexpr double shift = std::numbers::pi / 2;
    for (std::size_t g = 0; g < spec.gates.size(); ++g) {
        const GateOp &op = spec.gates[g];
        if (!op.slot) {
            continue;
        }
        generator_of(op.kind);
        const double orig = angles[g];
        angles[g] = orig + shift;
        const auto plus = run(angles);
        angles[g] = orig - shift;
        const auto minus = run(angles);
        angles[g] = orig;
        const std::size_t col = column_of(spec, *op.slot);
        for (std::size_t j = 0; j < observables.size(); ++j) {
            jac(j, col) += 0.5 * (plus[j] - minus[j]);
        }
    }
    return jac;
}

VjpResult adjoint_vjp(const CircuitSpec &spec, std::span<const double> trainable,
                      std::span<const double> inputs,
                      std::span<const Observable> observables,
                      std::span<const double> cotangent) {
    check_observables(spec, observables);
    if (cotangent.size() != observables.size()) {
        throw ValueError("adjoint_vjp: cotangent length differs from observable count");
    }
    const auto angles = resolve_angles(spec, trainable, inputs);
    VjpResult out;
    out.d_trainable.assign(spec.n_trainable, 0.0);
    out.d_inputs.assign(spec.n_inputs, 0.0);

    Statevector psi(spec.n_qubits);
    for (std::size_t g = 0; g < spec.gates.size(); ++g) {
        psi.apply(spec.gates[g], angles[g]);
    }
    out.values = expectations(psi, observables);

    Statevector lambda(spec.n_qubits,
                       std::vector<Complex>(psi.size(), Complex{0.0, 0.0}));
    {
        Statevector term = psi;
        for (std::size_t j = 0; j < observables.size(); ++j) {
            if (cotangent[j] == 0.0) {
                continue;
            }
            auto t = term.amplitudes();
            std::copy(psi.amplitudes().begin(), psi.amplitudes().end(), t.begin());
            term.apply_pauli(observables[j].kind, observables[j].wire);
            auto l = lambda.amplitudes();
            for (std::size_t i = 0; i < l.size(); ++i) {
                l[i] += cotangent[j] * t[i];
            }
        }
    }

    const std::size_t stop = first_slot_gate(spec);
    for (std::size_t g = spec.gates.size(); g-- > stop;) {
        const GateOp &op = spec.gates[g];
        if (op.slot) {
            const double d =
                lambda.pauli_inner(generator_of(op.kind), op.wires[0], psi).imag();
            if (op.slot->source == SlotSource::Trainable) {
                out.d_trainable[op.slot->index] += d;
            } else {
                out.d_inputs[op.slot->index] += d;
            }
        }
        if (g == stop) {
            break;
        }
        psi.apply_inverse(op, angles[g]);
        lambda.apply_inverse(op, angles[g]);
    }
    return out;
}

} // namespace hqf::qsim
