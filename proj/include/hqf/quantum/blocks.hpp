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
 * Hybrid blocks: quantum-guided skip recalibration and the gated
 * three-expert quantum bottleneck.
 *
 * Both start from the same compressor: adaptive pooling to an S x S map,
 * a 1x1 projection, tanh, and a cell-major flatten so that each qubit
 * receives three consecutive components.
 */
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "hqf/circuits/circuits.hpp"
#include "hqf/tensor/autodiff.hpp"

namespace hqf::quantum {

/// Qubit count with the matching compressor layout.
struct QuantumProfile {
    std::size_t n_qubits = 16;
    std::size_t pool = 4;      ///< S
    std::size_t channels = 3;  ///< compressor output channels
    circuits::QubitGrid grid;

    /// 16 qubits: S = 4, 3 channels. 8 qubits: S = 2, 6 channels.
    static QuantumProfile for_qubits(std::size_t n_qubits);
    [[nodiscard]] std::size_t features() const noexcept { return 2 * n_qubits; }
};

/// Optional record of intermediate shapes, filled by forward passes.
struct ShapeTrace {
    std::vector<std::pair<std::string, Shape>> entries;
    void add(const std::string &name, const Shape &shape) { entries.emplace_back(name, shape); }
    [[nodiscard]] const Shape *find(const std::string &name) const;
};

/**
 * Differentiable circuit evaluation. z is [B, 3n] with entries in (-1, 1),
 * encoded as angles pi * z; params holds the circuit's trainable angles.
 * Returns [B, 2n] features (Z block, then X block). Samples run in
 * parallel; parameter gradients are reduced in sample order.
 */
Var circuit_features(Tape &tape, const Var &z, const Var &params,
                     const qsim::CircuitSpec &spec);

struct Compressor {
    QuantumProfile profile;
    Var w;  ///< [channels, C]
    Var b;  ///< [channels]

    Compressor(const std::string &prefix, std::size_t in_channels,
               const QuantumProfile &profile, ParameterSet &params, Rng &rng);
};

/// X [B,C,H,W] -> z [B, 3n], |z| < 1.
Var compress_for_quantum(Tape &tape, const Var &x, const Compressor &comp,
                         ShapeTrace *trace = nullptr);

/// Compress, encode, run the enrichment circuit, measure: [B, 2n].
Var quantum_descriptor(Tape &tape, const Var &z, const qsim::CircuitSpec &circuit,
                       const Var &params);

struct QSkipBlock {
    Compressor compressor;
    qsim::CircuitSpec circuit;
    Var circuit_params;
    Var attn_w;  ///< [C, 2n]
    Var attn_b;  ///< [C]

    QSkipBlock(const std::string &prefix, std::size_t channels, const QuantumProfile &profile,
               ParameterSet &params, Rng &rng);
};

/// Y = X * a + X with a = sigmoid(W_a f_q + b) per sample and channel.
Var qskip_refine(Tape &tape, const Var &x, const QSkipBlock &block);

struct QMoEBottleneck {
    static constexpr std::size_t kExperts = 3;

    Compressor compressor;
    qsim::CircuitSpec enrichment;
    Var enrichment_params;
    Var gate_w;  ///< [3, 2n]
    Var gate_b;  ///< [3]
    std::array<Var, kExperts> expert_w;  ///< [3n, 2n]
    std::array<Var, kExperts> expert_b;  ///< [3n]
    /// Localist, globalist, diagonal.
    std::array<qsim::CircuitSpec, kExperts> experts;
    std::array<Var, kExperts> expert_params;
    Var out_w;  ///< [C_out, 2n]
    Var out_b;  ///< [C_out]

    QMoEBottleneck(const std::string &prefix, std::size_t in_channels,
                   std::size_t out_channels, const QuantumProfile &profile,
                   ParameterSet &params, Rng &rng);
};

/// softmax(W_g f_q + b): [B, 3].
Var qmoe_gate(Tape &tape, const Var &fq, const QMoEBottleneck &block);

/// Expert k in {1, 2, 3}: measure(run(circuit_k, encode(tanh(W_k f_q)))).
Var qmoe_expert(Tape &tape, std::size_t k, const Var &fq, const QMoEBottleneck &block);

/// X [B,C,H,W] -> X_B [B,C_out,H,W], every spatial position equal.
Var qmoe_bottleneck(Tape &tape, const Var &x, const QMoEBottleneck &block,
                    ShapeTrace *trace = nullptr);

} // namespace hqf::quantum
