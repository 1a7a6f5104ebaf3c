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
#include "hqf/circuits/circuits.hpp"

#include <cmath>
#include <numbers>

#include "hqf/tensor/error.hpp"

namespace hqf::circuits {

using qsim::GateKind;

QubitGrid QubitGrid::for_qubits(std::size_t n_qubits) {
    if (n_qubits == 16) {
        return {4, 4};
    }
    if (n_qubits == 8) {
        return {2, 4};
    }
    throw ValueError("QubitGrid: supported qubit counts are 8 and 16, got " +
                     std::to_string(n_qubits));
}

std::vector<double> encoding_angles(std::span<const double> z, std::size_t n_qubits) {
    if (z.size() != 3 * n_qubits) {
        throw ValueError("encode_features: expected " + std::to_string(3 * n_qubits) +
                         " components, got " + std::to_string(z.size()));
    }
    std::vector<double> angles(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(std::abs(z[i]) < 1.0)) {
            throw ValueError("encode_features: component " + std::to_string(i) +
                             " outside (-1, 1)");
        }
        angles[i] = std::numbers::pi * z[i];
    }
    return angles;
}

std::vector<GateOp> encode_features(std::span<const double> z, std::size_t n_qubits) {
    const auto angles = encoding_angles(z, n_qubits);
    std::vector<GateOp> gates;
    gates.reserve(angles.size());
    for (std::size_t q = 0; q < n_qubits; ++q) {
        gates.push_back(GateOp::fixed(GateKind::RX, q, angles[3 * q]));
        gates.push_back(GateOp::fixed(GateKind::RY, q, angles[3 * q + 1]));
        gates.push_back(GateOp::fixed(GateKind::RZ, q, angles[3 * q + 2]));
    }
    return gates;
}

std::vector<GateOp> encoding_layer(std::size_t n_qubits) {
    std::vector<GateOp> gates;
    for (std::size_t q = 0; q < n_qubits; ++q) {
        gates.push_back(GateOp::input(GateKind::RX, q, 3 * q));
        gates.push_back(GateOp::input(GateKind::RY, q, 3 * q + 1));
        gates.push_back(GateOp::input(GateKind::RZ, q, 3 * q + 2));
    }
    return gates;
}

std::vector<GateOp> build_two_qubit_filter(std::size_t w0, std::size_t w1,
                                           std::size_t slot_base) {
    if (w0 == w1) {
        throw ValueError("build_two_qubit_filter: wires must differ");
    }
    return {GateOp::trainable(GateKind::RY, w0, slot_base),
            GateOp::trainable(GateKind::RY, w1, slot_base + 1), GateOp::cnot(w0, w1),
            GateOp::trainable(GateKind::RY, w0, slot_base + 2),
            GateOp::trainable(GateKind::RY, w1, slot_base + 3)};
}

namespace {

struct Builder {
    CircuitSpec spec;

    explicit Builder(std::size_t n) {
        spec.n_qubits = n;
        spec.n_inputs = 3 * n;
        spec.gates = encoding_layer(n);
    }
    void filter(std::size_t w0, std::size_t w1) {
        for (auto &g : build_two_qubit_filter(w0, w1, spec.n_trainable)) {
            spec.gates.push_back(g);
        }
        spec.n_trainable += 4;
    }
    void rotation_layer(GateKind kind) {
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            spec.gates.push_back(GateOp::trainable(kind, q, spec.n_trainable++));
        }
    }
    void cnot(std::size_t c, std::size_t t) { spec.gates.push_back(GateOp::cnot(c, t)); }
    void ring() {
        const std::size_t n = spec.n_qubits;
        for (std::size_t q = 0; q < n; ++q) {
            cnot(q, (q + 1) % n);
        }
    }
    CircuitSpec done() {
        spec.validate();
        return std::move(spec);
    }
};

} // namespace

CircuitSpec build_filter_circuit() {
    Builder b(2);
    b.filter(0, 1);
    return b.done();
}

CircuitSpec build_enrichment_multiscale(const QubitGrid &grid) {
    Builder b(grid.size());
    for (std::size_t parity = 0; parity < 2; ++parity) {
        for (std::size_t r = 0; r < grid.rows; ++r) {
            for (std::size_t c = parity; c + 1 < grid.cols; c += 2) {
                b.filter(grid.index(r, c), grid.index(r, c + 1));
            }
        }
    }
    for (std::size_t parity = 0; parity < 2; ++parity) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            for (std::size_t r = parity; r + 1 < grid.rows; r += 2) {
                b.filter(grid.index(r, c), grid.index(r + 1, c));
            }
        }
    }
    b.rotation_layer(GateKind::RY);
    b.ring();
    return b.done();
}

CircuitSpec build_localist(const QubitGrid &grid) {
    Builder b(grid.size());
    for (int layer = 0; layer < 2; ++layer) {
        b.rotation_layer(GateKind::RY);
        for (std::size_t q = 0; q + 1 < grid.size(); ++q) {
            b.cnot(q, q + 1);
        }
    }
    return b.done();
}

CircuitSpec build_globalist(const QubitGrid &grid) {
    const std::size_t n = grid.size();
    Builder b(n);
    b.rotation_layer(GateKind::RX);
    b.rotation_layer(GateKind::RY);
    b.rotation_layer(GateKind::RZ);
    b.ring();
    for (std::size_t q = 0; q < n; ++q) {
        b.cnot(q, (q + n / 2) % n);
    }
    b.rotation_layer(GateKind::RY);
    return b.done();
}

CircuitSpec build_diagonal(const QubitGrid &grid) {
    Builder b(grid.size());
    b.rotation_layer(GateKind::RY);
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            b.cnot(grid.index(r, c), grid.index((r + 1) % grid.rows, (c + 1) % grid.cols));
        }
    }
    b.rotation_layer(GateKind::RY);
    return b.done();
}

const std::vector<std::string> &circuit_names() {
    static const std::vector<std::string> names{"enrichment", "localist", "globalist",
                                                "diagonal", "filter"};
    return names;
}

CircuitSpec build_by_name(const std::string &name, const QubitGrid &grid) {
    if (name == "enrichment") {
        return build_enrichment_multiscale(grid);
    }
    if (name == "localist") {
        return build_localist(grid);
    }
    if (name == "globalist") {
        return build_globalist(grid);
    }
    if (name == "diagonal") {
        return build_diagonal(grid);
    }
    if (name == "filter") {
        return build_filter_circuit();
    }
    throw ValueError("unknown circuit '" + name +
                     "' (expected enrichment, localist, globalist, diagonal, filter)");
}

std::vector<qsim::Observable> feature_observables(std::size_t n_qubits) {
    std::vector<qsim::Observable> obs;
    obs.reserve(2 * n_qubits);
    for (std::size_t q = 0; q < n_qubits; ++q) {
        obs.push_back({qsim::Pauli::Z, q});
    }
    for (std::size_t q = 0; q < n_qubits; ++q) {
        obs.push_back({qsim::Pauli::X, q});
    }
    return obs;
}

std::vector<double> measure_features(const qsim::Statevector &state) {
    return qsim::expectations(state, feature_observables(state.n_qubits()));
}

std::vector<double> init_parameters(std::size_t count, Rng &rng) {
    std::vector<double> p(count);
    for (auto &v : p) {
        v = rng.uniform(-0.1, 0.1);
    }
    return p;
}

} // namespace hqf::circuits
