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
#include "hqf/qsim/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hqf/tensor/error.hpp"

namespace hqf::qsim {

namespace {
void check_qubit_count(std::size_t n) {
    if (n < 1 || n > 16) {
        throw ValueError("Statevector: n_qubits must lie in [1, 16], got " +
                         std::to_string(n));
    }
}
} // namespace

Statevector::Statevector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    check_qubit_count(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
}

Statevector::Statevector(std::size_t n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    check_qubit_count(n_qubits);
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
        throw ValueError("Statevector: amplitude count must be 2^n_qubits");
    }
}

void Statevector::check_wire(std::size_t wire) const {
    if (wire >= n_qubits_) {
        throw ValueError("Statevector: wire " + std::to_string(wire) +
                         " out of range for " + std::to_string(n_qubits_) +
                         " qubits");
    }
}

/// Calls f(a0, a1) for every amplitude pair differing only in `wire`,
/// a0 having the bit clear.
template <typename F> void Statevector::for_each_pair(std::size_t wire, F &&f) {
    check_wire(wire);
    const std::size_t stride = std::size_t{1} << wire;
    const std::size_t n = amps_.size();
    Complex *a = amps_.data();
    for (std::size_t base = 0; base < n; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            f(a[i], a[i + stride]);
        }
    }
}

void Statevector::apply_h(std::size_t wire) {
    const double r = std::numbers::sqrt2 / 2.0;
    for_each_pair(wire, [r](Complex &a0, Complex &a1) {
        const Complex t0 = a0;
        a0 = r * (t0 + a1);
        a1 = r * (t0 - a1);
    });
}

void Statevector::apply_rx(std::size_t wire, double angle) {
    const double c = std::cos(angle / 2);
    const Complex mis{0.0, -std::sin(angle / 2)};
    for_each_pair(wire, [c, mis](Complex &a0, Complex &a1) {
        const Complex t0 = a0;
        a0 = c * t0 + mis * a1;
        a1 = mis * t0 + c * a1;
    });
}

void Statevector::apply_ry(std::size_t wire, double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    for_each_pair(wire, [c, s](Complex &a0, Complex &a1) {
        const Complex t0 = a0;
        a0 = c * t0 - s * a1;
        a1 = s * t0 + c * a1;
    });
}

void Statevector::apply_rz(std::size_t wire, double angle) {
    const Complex p0 = std::polar(1.0, -angle / 2);
    const Complex p1 = std::polar(1.0, angle / 2);
    for_each_pair(wire, [p0, p1](Complex &a0, Complex &a1) {
        a0 *= p0;
        a1 *= p1;
    });
}

void Statevector::apply_cnot(std::size_t control, std::size_t target) {
    check_wire(control);
    check_wire(target);
    if (control == target) {
        throw ValueError("Statevector::apply_cnot: control equals target");
    }
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) != 0 && (i & tbit) == 0) {
            std::swap(amps_[i], amps_[i | tbit]);
        }
    }
}

void Statevector::apply_pauli(Pauli pauli, std::size_t wire) {
    switch (pauli) {
    case Pauli::X:
        for_each_pair(wire, [](Complex &a0, Complex &a1) { std::swap(a0, a1); });
        break;
    case Pauli::Y:
        for_each_pair(wire, [](Complex &a0, Complex &a1) {
            const Complex t0 = a0;
            a0 = Complex{0, -1} * a1;
            a1 = Complex{0, 1} * t0;
        });
        break;
    case Pauli::Z:
        for_each_pair(wire, [](Complex &, Complex &a1) { a1 = -a1; });
        break;
    }
}

void Statevector::apply(const GateOp &op, double angle) {
    switch (op.kind) {
    case GateKind::H:
        apply_h(op.wires[0]);
        break;
    case GateKind::RX:
        apply_rx(op.wires[0], angle);
        break;
    case GateKind::RY:
        apply_ry(op.wires[0], angle);
        break;
    case GateKind::RZ:
        apply_rz(op.wires[0], angle);
        break;
    case GateKind::CNOT:
        apply_cnot(op.wires[0], op.wires[1]);
        break;
    }
}

void Statevector::apply_inverse(const GateOp &op, double angle) {
    // H and CNOT are self-inverse; rotations invert by negating the angle.
    apply(op, -angle);
}

double Statevector::norm_squared() const {
    double sum = 0.0;
    double comp = 0.0;
    for (const auto &a : amps_) {
        const double y = std::norm(a) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

Complex Statevector::inner(const Statevector &other) const {
    if (other.size() != size()) {
        throw ValueError("Statevector::inner: size mismatch");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        acc += std::conj(amps_[i]) * other.amps_[i];
    }
    return acc;
}

Complex Statevector::pauli_inner(Pauli pauli, std::size_t wire,
                                 const Statevector &other) const {
    check_wire(wire);
    if (other.size() != size()) {
        throw ValueError("Statevector::pauli_inner: size mismatch");
    }
    const std::size_t bit = std::size_t{1} << wire;
    const Complex *l = amps_.data();
    const Complex *r = other.amps_.data();
    Complex acc{0.0, 0.0};
    switch (pauli) {
    case Pauli::X:
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            acc += std::conj(l[i]) * r[i ^ bit];
        }
        break;
    case Pauli::Y:
        // (Y psi)_i = +i psi_{i^bit} when bit set, -i psi_{i^bit} otherwise.
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            const Complex v = r[i ^ bit];
            const Complex yv = (i & bit) != 0 ? Complex{-v.imag(), v.real()}
                                              : Complex{v.imag(), -v.real()};
            acc += std::conj(l[i]) * yv;
        }
        break;
    case Pauli::Z:
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            const Complex t = std::conj(l[i]) * r[i];
            acc += (i & bit) != 0 ? -t : t;
        }
        break;
    }
    return acc;
}

double expectation(const Statevector &state, const Observable &obs) {
    if (obs.wire >= state.n_qubits()) {
        throw ValueError("expectation: wire out of range");
    }
    const auto amps = state.amplitudes();
    const std::size_t bit = std::size_t{1} << obs.wire;
    double acc = 0.0;
    switch (obs.kind) {
    case Pauli::Z:
        for (std::size_t i = 0; i < amps.size(); ++i) {
            const double p = std::norm(amps[i]);
            acc += (i & bit) != 0 ? -p : p;
        }
        break;
    case Pauli::X:
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if ((i & bit) == 0) {
                acc += 2.0 * (std::conj(amps[i]) * amps[i | bit]).real();
            }
        }
        break;
    case Pauli::Y:
        acc = state.pauli_inner(Pauli::Y, obs.wire, state).real();
        break;
    }
    return std::clamp(acc, -1.0, 1.0);
}

std::vector<double> expectations(const Statevector &state,
                                 std::span<const Observable> observables) {
    std::vector<double> out;
    out.reserve(observables.size());
    for (const auto &o : observables) {
        out.push_back(expectation(state, o));
    }
    return out;
}

Statevector apply_gate(Statevector state, const GateOp &op,
                       std::optional<double> angle) {
    const bool needs_angle = is_rotation(op.kind) && !op.fixed_angle;
    if (needs_angle != angle.has_value()) {
        throw ValueError(std::string("apply_gate: ") +
                         (needs_angle ? "rotation slot needs an angle"
                                      : "gate takes no external angle"));
    }
    state.apply(op, angle ? *angle : op.fixed_angle.value_or(0.0));
    return state;
}

Statevector run_circuit(const CircuitSpec &spec, std::span<const double> trainable,
                        std::span<const double> inputs) {
    const auto angles = resolve_angles(spec, trainable, inputs);
    Statevector state(spec.n_qubits);
    for (std::size_t g = 0; g < spec.gates.size(); ++g) {
        state.apply(spec.gates[g], angles[g]);
    }
    return state;
}

} // namespace hqf::qsim
