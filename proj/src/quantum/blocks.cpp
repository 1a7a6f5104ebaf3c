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
#include "hqf/quantum/blocks.hpp"

#include <numbers>

#include "hqf/qsim/gradients.hpp"
#include "hqf/tensor/error.hpp"
#include "hqf/tensor/init.hpp"
#include "hqf/tensor/ops.hpp"
#include "hqf/tensor/parallel.hpp"

namespace hqf::quantum {

QuantumProfile QuantumProfile::for_qubits(std::size_t n_qubits) {
    QuantumProfile p;
    p.n_qubits = n_qubits;
    p.grid = circuits::QubitGrid::for_qubits(n_qubits);
    if (n_qubits == 16) {
        p.pool = 4;
        p.channels = 3;
    } else {
        // 2x2 cells with six channels: each cell feeds two qubits.
        p.pool = 2;
        p.channels = 6;
    }
    return p;
}

const Shape *ShapeTrace::find(const std::string &name) const {
    for (const auto &[n, s] : entries) {
        if (n == name) {
            return &s;
        }
    }
    return nullptr;
}

Var circuit_features(Tape &tape, const Var &z, const Var &params,
                     const qsim::CircuitSpec &spec) {
    const std::size_t n = spec.n_qubits;
    if (z.shape().size() != 2 || z.shape()[1] != 3 * n || spec.n_inputs != 3 * n) {
        throw DimensionError("circuit_features", "z",
                             "expected [B, " + std::to_string(3 * n) + "], got " +
                                 shape_str(z.shape()));
    }
    if (params.shape() != Shape{spec.n_trainable}) {
        throw DimensionError("circuit_features", "params", spec.n_trainable,
                             params.value().numel());
    }
    const std::size_t b = z.shape()[0];
    const std::size_t nf = 2 * n;
    const auto observables = circuits::feature_observables(n);

    Tensor out({b, nf});
    parallel_for(b, [&](std::size_t i) {
        const auto row = z.value().data().subspan(i * 3 * n, 3 * n);
        const auto angles = circuits::encoding_angles(row, n);
        const auto f = qsim::expectations(
            qsim::run_circuit(spec, params.value().data(), angles), observables);
        std::copy(f.begin(), f.end(), out.raw() + i * nf);
    });

    Var y = tape.output(std::move(out), {&z, &params});
    if (y.requires_grad()) {
        tape.record([z, params, y, spec, observables, b, n, nf]() mutable {
            if (!y.has_grad()) {
                return;
            }
            std::vector<std::vector<double>> d_params(b);
            double *gz = z.requires_grad() ? z.grad().raw() : nullptr;
            parallel_for(b, [&](std::size_t i) {
                const auto row = z.value().data().subspan(i * 3 * n, 3 * n);
                const auto angles = circuits::encoding_angles(row, n);
                const auto cot = y.grad().data().subspan(i * nf, nf);
                auto r = qsim::adjoint_vjp(spec, params.value().data(), angles, observables, cot);
                if (gz != nullptr) {
                    for (std::size_t j = 0; j < 3 * n; ++j) {
                        gz[i * 3 * n + j] += std::numbers::pi * r.d_inputs[j];
                    }
                }
                d_params[i] = std::move(r.d_trainable);
            });
            if (params.requires_grad()) {
                Tensor &gp = params.grad();
                for (std::size_t i = 0; i < b; ++i) {
                    for (std::size_t j = 0; j < gp.numel(); ++j) {
                        gp[j] += d_params[i][j];
                    }
                }
            }
        });
    }
    return y;
}

Compressor::Compressor(const std::string &prefix, std::size_t in_channels,
                       const QuantumProfile &profile_, ParameterSet &params, Rng &rng)
    : profile(profile_) {
    w = params.add(prefix + ".w",
                   init::fan_in_uniform({profile.channels, in_channels}, in_channels, rng));
    b = params.add(prefix + ".b", Tensor({profile.channels}));
}

Var compress_for_quantum(Tape &tape, const Var &x, const Compressor &comp,
                         ShapeTrace *trace) {
    if (x.shape().size() != 4) {
        throw DimensionError("compress_for_quantum", "rank", 4, x.shape().size());
    }
    const std::size_t bsz = x.shape()[0];
    const std::size_t s = comp.profile.pool;
    Var pooled = ops::adaptive_avg_pool(tape, x, s);
    Var mapped = ops::tanh(tape, ops::conv1x1(tape, pooled, comp.w, comp.b));
    if (trace != nullptr) {
        trace->add("compressed", mapped.shape());
    }
    // Cell-major order: qubit i reads components 3i, 3i+1, 3i+2.
    Var cells = ops::permute(tape, mapped, {0, 2, 3, 1});
    Var z = ops::reshape(tape, cells, {bsz, s * s * comp.profile.channels});
    if (trace != nullptr) {
        trace->add("z", z.shape());
    }
    return z;
}

Var quantum_descriptor(Tape &tape, const Var &z, const qsim::CircuitSpec &circuit,
                       const Var &params) {
    return circuit_features(tape, z, params, circuit);
}

namespace {

Var circuit_param(ParameterSet &params, const std::string &name,
                  const qsim::CircuitSpec &spec, Rng &rng) {
    const auto init = circuits::init_parameters(spec.n_trainable, rng);
    return params.add(name, Tensor({spec.n_trainable}, init));
}

} // namespace

QSkipBlock::QSkipBlock(const std::string &prefix, std::size_t channels,
                       const QuantumProfile &profile, ParameterSet &params, Rng &rng)
    : compressor(prefix + ".compress", channels, profile, params, rng),
      circuit(circuits::build_enrichment_multiscale(profile.grid)) {
    circuit_params = circuit_param(params, prefix + ".circuit", circuit, rng);
    const std::size_t nf = profile.features();
    attn_w = params.add(prefix + ".attn_w", init::fan_in_uniform({channels, nf}, nf, rng));
    attn_b = params.add(prefix + ".attn_b", Tensor({channels}));
}

Var qskip_refine(Tape &tape, const Var &x, const QSkipBlock &block) {
    Var z = compress_for_quantum(tape, x, block.compressor);
    Var fq = quantum_descriptor(tape, z, block.circuit, block.circuit_params);
    Var a = ops::sigmoid(tape, ops::linear(tape, fq, block.attn_w, block.attn_b));
    return ops::add(tape, ops::scale_channels(tape, x, a), x);
}

QMoEBottleneck::QMoEBottleneck(const std::string &prefix, std::size_t in_channels,
                               std::size_t out_channels, const QuantumProfile &profile,
                               ParameterSet &params, Rng &rng)
    : compressor(prefix + ".compress", in_channels, profile, params, rng),
      enrichment(circuits::build_enrichment_multiscale(profile.grid)),
      experts{circuits::build_localist(profile.grid), circuits::build_globalist(profile.grid),
              circuits::build_diagonal(profile.grid)} {
    const std::size_t nf = profile.features();
    const std::size_t nu = 3 * profile.n_qubits;
    enrichment_params = circuit_param(params, prefix + ".enrichment", enrichment, rng);
    gate_w = params.add(prefix + ".gate_w", init::fan_in_uniform({kExperts, nf}, nf, rng));
    gate_b = params.add(prefix + ".gate_b", Tensor({kExperts}));
    static const char *names[kExperts] = {"localist", "globalist", "diagonal"};
    for (std::size_t k = 0; k < kExperts; ++k) {
        const std::string base = prefix + ".expert_" + names[k];
        expert_w[k] = params.add(base + ".w", init::fan_in_uniform({nu, nf}, nf, rng));
        expert_b[k] = params.add(base + ".b", Tensor({nu}));
        expert_params[k] = circuit_param(params, base + ".circuit", experts[k], rng);
    }
    out_w = params.add(prefix + ".out_w", init::fan_in_uniform({out_channels, nf}, nf, rng));
    out_b = params.add(prefix + ".out_b", Tensor({out_channels}));
}

Var qmoe_gate(Tape &tape, const Var &fq, const QMoEBottleneck &block) {
    return ops::softmax(tape, ops::linear(tape, fq, block.gate_w, block.gate_b));
}

Var qmoe_expert(Tape &tape, std::size_t k, const Var &fq, const QMoEBottleneck &block) {
    if (k < 1 || k > QMoEBottleneck::kExperts) {
        throw ValueError("qmoe_expert: expert index must be 1, 2 or 3, got " +
                         std::to_string(k));
    }
    const std::size_t i = k - 1;
    Var u = ops::tanh(tape, ops::linear(tape, fq, block.expert_w[i], block.expert_b[i]));
    return circuit_features(tape, u, block.expert_params[i], block.experts[i]);
}

Var qmoe_bottleneck(Tape &tape, const Var &x, const QMoEBottleneck &block, ShapeTrace *trace) {
    Var z = compress_for_quantum(tape, x, block.compressor, trace);
    Var fq = quantum_descriptor(tape, z, block.enrichment, block.enrichment_params);
    if (trace != nullptr) {
        trace->add("f_q", fq.shape());
    }
    Var g = qmoe_gate(tape, fq, block);
    std::vector<Var> outs;
    for (std::size_t k = 1; k <= QMoEBottleneck::kExperts; ++k) {
        outs.push_back(qmoe_expert(tape, k, fq, block));
    }
    Var mixed = ops::mixture(tape, g, outs);
    Var b = ops::linear(tape, mixed, block.out_w, block.out_b);
    Var xb = ops::broadcast_spatial(tape, b, x.shape()[2], x.shape()[3]);
    if (trace != nullptr) {
        trace->add("X_B", xb.shape());
    }
    return xb;
}

} // namespace hqf::quantum
