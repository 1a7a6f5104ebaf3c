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
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hqf/circuits/circuits.hpp"
#include "hqf/qsim/gradients.hpp"
#include "hqf/tensor/error.hpp"

using namespace hqf;
using namespace hqf::circuits;
using qsim::Complex;
using qsim::GateKind;
using qsim::Statevector;
using std::numbers::pi;

namespace {

Statevector run_gates(std::size_t n, const std::vector<GateOp> &gates) {
    Statevector s(n);
    for (const auto &g : gates) s.apply(g, g.fixed_angle.value_or(0.0));
    return s;
}

std::size_t cnot_distance(const GateOp &g) {
    return g.wires[0] > g.wires[1] ? g.wires[0] - g.wires[1] : g.wires[1] - g.wires[0];
}

const QubitGrid g16 = QubitGrid::for_qubits(16);
const QubitGrid g8 = QubitGrid::for_qubits(8);

} // namespace

TEST_CASE("grid layout") {
    CHECK(g16.rows == 4);
    CHECK(g16.cols == 4);
    CHECK(g8.rows == 2);
    CHECK(g8.cols == 4);
    std::vector<int> seen(16, 0);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) ++seen[g16.index(r, c)];
    for (int v : seen) CHECK(v == 1);
    CHECK_THROWS_AS(QubitGrid::for_qubits(9), ValueError);
}

TEST_SUITE("encoding") {
    TEST_CASE("zero features leave |0...0>") {
        auto s = run_gates(4, encode_features(std::vector<double>(12, 0.0), 4));
        CHECK(s[0] == Complex(1, 0));
    }

    TEST_CASE("near-unit RX component flips the qubit") {
        double prev = 1.0;
        for (double eps : {1e-1, 1e-3, 1e-6}) {
            std::vector<double> z{1 - eps, 0, 0};
            const double ez = qsim::expectation(run_gates(1, encode_features(z, 1)), {qsim::Pauli::Z, 0});
            CHECK(ez < prev);
            CHECK(ez + 1.0 <= 1.5 * (pi * eps) * (pi * eps) / 2);
            prev = ez;
        }
    }

    TEST_CASE("RY component matches the 2x2 oracle") {
        std::vector<double> z{0, 0.5, 0};
        auto s = run_gates(1, encode_features(z, 1));
        // RY(pi/2)|0> = (cos(pi/4), sin(pi/4)).
        CHECK(std::abs(s[0] - std::cos(pi / 4)) <= 1e-15);
        CHECK(std::abs(s[1] - std::sin(pi / 4)) <= 1e-15);
        auto f = measure_features(s);
        CHECK(std::abs(f[0]) <= 1e-15);
        CHECK(std::abs(f[1] - 1.0) <= 1e-15);
    }

    TEST_CASE("out-of-range components are rejected") {
        CHECK_THROWS_AS((void)encode_features(std::vector<double>{1.0, 0, 0}, 1), ValueError);
        CHECK_THROWS_AS((void)encode_features(std::vector<double>{0, -1.5, 0}, 1), ValueError);
        CHECK_THROWS_AS((void)encode_features(std::vector<double>{0, NAN, 0}, 1), ValueError);
        CHECK_THROWS_AS((void)encode_features(std::vector<double>{0, 0}, 1), ValueError);
    }

    TEST_CASE("fixed encoding equals the slot-bound encoding layer") {
        Rng rng(1);
        std::vector<double> z(24);
        for (auto &v : z) v = rng.uniform(-0.99, 0.99);
        auto a = run_gates(8, encode_features(z, 8));
        CircuitSpec spec{8, encoding_layer(8), 0, 24};
        auto b = qsim::run_circuit(spec, {}, encoding_angles(z, 8));
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_SUITE("filter") {
    TEST_CASE("fragment layout") {
        auto f = build_two_qubit_filter(3, 5, 7);
        REQUIRE(f.size() == 5);
        std::vector<std::size_t> slots;
        for (const auto &g : f)
            if (g.slot) slots.push_back(g.slot->index);
        CHECK(slots == std::vector<std::size_t>{7, 8, 9, 10});
        CHECK(f[2] == GateOp::cnot(3, 5));
        CHECK_THROWS_AS((void)build_two_qubit_filter(2, 2, 0), ValueError);
    }

    TEST_CASE("zero angles keep |00>, t0 = pi gives |11>") {
        auto spec = build_filter_circuit();
        CHECK(spec.n_trainable == 4);
        const std::vector<double> x(6, 0.0);
        auto s0 = qsim::run_circuit(spec, std::vector<double>(4, 0.0), x);
        CHECK(std::abs(s0[0] - 1.0) <= 1e-15);
        auto s1 = qsim::run_circuit(spec, std::vector<double>{pi, 0, 0, 0}, x);
        CHECK(std::abs(std::abs(s1[3]) - 1.0) <= 1e-15);
    }
}

TEST_SUITE("builders") {
    TEST_CASE("enrichment parameter count matches pair enumeration") {
        for (const auto &g : {g16, g8}) {
            std::size_t pairs = 0;
            for (std::size_t r = 0; r < g.rows; ++r)
                for (std::size_t c = 0; c + 1 < g.cols; ++c) ++pairs;
            for (std::size_t c = 0; c < g.cols; ++c)
                for (std::size_t r = 0; r + 1 < g.rows; ++r) ++pairs;
            auto spec = build_enrichment_multiscale(g);
            CHECK(spec.n_trainable == 4 * pairs + g.size());
            CHECK(spec.n_inputs == 3 * g.size());
        }
        CHECK(build_enrichment_multiscale(g16).n_trainable == 112);
        CHECK(build_enrichment_multiscale(g8).n_trainable == 48);
    }

    TEST_CASE("enrichment filters couple grid neighbours, ring closes") {
        auto spec = build_enrichment_multiscale(g16);
        std::size_t ring = 0;
        for (std::size_t i = 48; i < spec.gates.size(); ++i) {
            const auto &g = spec.gates[i];
            if (g.kind != GateKind::CNOT) continue;
            const std::size_t d = cnot_distance(g);
            const bool horizontal = d == 1 && g.wires[0] / 4 == g.wires[1] / 4;
            const bool vertical = d == 4;
            const bool wrap = g.wires[1] == (g.wires[0] + 1) % 16;
            CHECK((horizontal || vertical || wrap));
            if (g.wires[1] == (g.wires[0] + 1) % 16) ++ring;
        }
        CHECK(ring >= 16);
    }

    TEST_CASE("localist, globalist and diagonal structure") {
        for (const auto &g : {g16, g8}) {
            const std::size_t n = g.size();
            auto loc = build_localist(g);
            auto glo = build_globalist(g);
            auto dia = build_diagonal(g);
            CHECK(loc.n_trainable == 2 * n);
            CHECK(glo.n_trainable == 4 * n);
            CHECK(dia.n_trainable == 2 * n);
            for (const auto &op : loc.gates)
                if (op.kind == GateKind::CNOT) CHECK(cnot_distance(op) == 1);
            bool long_range = false;
            for (const auto &op : glo.gates)
                if (op.kind == GateKind::CNOT && cnot_distance(op) == n / 2) long_range = true;
            CHECK(long_range);
            std::size_t diag = 0;
            for (const auto &op : dia.gates) {
                if (op.kind != GateKind::CNOT) continue;
                const std::size_t r = op.wires[0] / g.cols, c = op.wires[0] % g.cols;
                CHECK(op.wires[1] == g.index((r + 1) % g.rows, (c + 1) % g.cols));
                ++diag;
            }
            CHECK(diag == n);
        }
    }

    TEST_CASE("zero parameters preserve |0...0> and give the trivial features") {
        for (const auto &name : circuit_names()) {
            auto spec = build_by_name(name, g8);
            auto s = qsim::run_circuit(spec, std::vector<double>(spec.n_trainable, 0.0),
                                       std::vector<double>(spec.n_inputs, 0.0));
            CHECK(s[0] == Complex(1, 0));
            auto f = measure_features(s);
            REQUIRE(f.size() == 2 * spec.n_qubits);
            for (std::size_t q = 0; q < spec.n_qubits; ++q) {
                CHECK(f[q] == 1.0);
                CHECK(f[spec.n_qubits + q] == 0.0);
            }
        }
        CHECK_THROWS_AS((void)build_by_name("ring", g8), ValueError);
    }

    TEST_CASE("builders are pure") {
        for (const auto &name : circuit_names()) CHECK(build_by_name(name, g16) == build_by_name(name, g16));
        CHECK(qsim::dump_circuit(build_globalist(g16)) == qsim::dump_circuit(build_globalist(g16)));
    }

    TEST_CASE("norm and gradient agreement under random parameters") {
        Rng rng(3);
        for (const auto &name : circuit_names()) {
            auto spec = build_by_name(name, g8);
            const auto obs = feature_observables(spec.n_qubits);
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<double> th(spec.n_trainable), x(spec.n_inputs);
                for (auto &v : th) v = rng.uniform(-pi, pi);
                for (auto &v : x) v = rng.uniform(-pi, pi);
                auto s = qsim::run_circuit(spec, th, x);
                CHECK(std::abs(s.norm_squared() - 1.0) <= 1e-12);
                auto adj = qsim::adjoint_gradients(spec, th, x, obs);
                auto ps = qsim::parameter_shift_gradients(spec, th, x, obs);
                double worst = 0.0;
                for (std::size_t i = 0; i < adj.data.size(); ++i)
                    worst = std::max(worst, std::abs(adj.data[i] - ps.data[i]));
                INFO(name);
                CHECK(worst <= 1e-9);
            }
        }
    }
}

TEST_SUITE("measurement") {
    TEST_CASE("Bell pair features") {
        Statevector s(4);
        s.apply_h(0);
        s.apply_cnot(0, 1);
        auto f = measure_features(s);
        REQUIRE(f.size() == 8);
        for (std::size_t q : {0u, 1u}) {
            CHECK(std::abs(f[q]) <= 1e-15);
            CHECK(std::abs(f[4 + q]) <= 1e-15);
        }
        CHECK(f[2] == 1.0);
        for (double v : f) CHECK(std::abs(v) <= 1.0);
    }

    TEST_CASE("initial parameters are small") {
        Rng rng(5);
        for (double v : init_parameters(1000, rng)) CHECK(std::abs(v) <= 0.1);
    }
}
