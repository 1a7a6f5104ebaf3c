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
#include "hqf/train/oracles.hpp"

#include <cmath>
#include <numbers>

#include "hqf/circuits/circuits.hpp"
#include "hqf/dmcaf/dmcaf.hpp"
#include "hqf/qsim/gradients.hpp"
#include "hqf/quantum/blocks.hpp"
#include "hqf/segnet/net.hpp"
#include "hqf/tensor/gradcheck.hpp"
#include "hqf/tensor/ops.hpp"
#include "hqf/train/loss.hpp"

namespace hqf::train {

namespace {

constexpr double kCircuitFdStep = 1e-5;

Tensor random_tensor(Rng &rng, Shape shape, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (auto &v : t.data()) {
        v = rng.uniform(lo, hi);
    }
    return t;
}

std::vector<double> random_angles(Rng &rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto &v : out) {
        v = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    return out;
}

double graph_error(const ScalarGraph &g, const std::vector<Var> &inputs, std::uint64_t seed,
                   std::size_t coords = 0) {
    GraphCheckOptions opt;
    opt.seed = seed;
    opt.max_coords = coords;
    return check_graph_gradients(g, inputs, opt);
}

} // namespace

CircuitGradientCheck check_circuit_gradients(const std::string &builder, std::size_t n_qubits,
                                             std::uint64_t seed) {
    const auto grid = circuits::QubitGrid::for_qubits(n_qubits);
    const qsim::CircuitSpec spec = circuits::build_by_name(builder, grid);
    const auto obs = circuits::feature_observables(spec.n_qubits);
    Rng rng(mix_seed({seed, fnv1a(builder), n_qubits}));
    const auto theta = random_angles(rng, spec.n_trainable);
    const auto x = random_angles(rng, spec.n_inputs);

    const auto adj = qsim::adjoint_gradients(spec, theta, x, obs);
    const auto shift = qsim::parameter_shift_gradients(spec, theta, x, obs);
    CircuitGradientCheck out;
    for (std::size_t i = 0; i < adj.data.size(); ++i) {
        out.adjoint_vs_shift = std::max(out.adjoint_vs_shift, std::abs(adj.data[i] - shift.data[i]));
    }

    // One pair of runs per coordinate serves every observable.
    std::vector<double> th = theta;
    std::vector<double> in = x;
    const std::size_t cols = spec.n_trainable + spec.n_inputs;
    for (std::size_t c = 0; c < cols; ++c) {
        double &slot = c < spec.n_trainable ? th[c] : in[c - spec.n_trainable];
        const double orig = slot;
        slot = orig + kCircuitFdStep;
        const auto plus = qsim::expectations(qsim::run_circuit(spec, th, in), obs);
        slot = orig - kCircuitFdStep;
        const auto minus = qsim::expectations(qsim::run_circuit(spec, th, in), obs);
        slot = orig;
        for (std::size_t o = 0; o < obs.size(); ++o) {
            const double fd = (plus[o] - minus[o]) / (2.0 * kCircuitFdStep);
            out.shift_vs_fd = std::max(out.shift_vs_fd, std::abs(shift(o, c) - fd));
        }
    }
    return out;
}

double check_network_gradients(const segnet::NetConfig &cfg, std::size_t coords,
                               std::uint64_t seed) {
    segnet::HqfNet net(cfg, mix_seed({seed, 1}));
    segnet::SyntheticProvider provider(seed);
    Rng rng(mix_seed({seed, 2}));
    const Var image(random_tensor(rng, {1, 3, cfg.input, cfg.input}, 0.0, 1.0));
    const auto sem = net.gather_semantic(provider, {"gradcheck"});
    const Tensor w = random_tensor(rng, {1, cfg.classes, cfg.input, cfg.input});
    std::vector<Var> inputs;
    for (const auto &p : net.parameters().items()) {
        inputs.push_back(p.var);
    }
    const ScalarGraph g = [&](Tape &t, const std::vector<Var> &) {
        return ops::weighted_sum(t, net.forward(t, image, sem), w);
    };
    GraphCheckOptions opt;
    opt.max_coords = coords;
    opt.seed = seed;
    opt.h = 1e-5;
    return check_graph_gradients(g, inputs, opt);
}

std::vector<OracleResult> run_gradient_oracles(
    const OracleOptions &options, const std::function<void(const OracleResult &)> &on_result) {
    std::vector<OracleResult> results;
    const auto report = [&](std::string name, double err, double tol) {
        results.push_back({std::move(name), err, tol});
        if (on_result) {
            on_result(results.back());
        }
    };
    const std::uint64_t seed = options.seed;

    for (const auto &name : circuits::circuit_names()) {
        const auto r = check_circuit_gradients(name, options.n_qubits, seed);
        report("circuit/" + name + "/adjoint-vs-shift", r.adjoint_vs_shift, 1e-9);
        report("circuit/" + name + "/shift-vs-fd", r.shift_vs_fd, 1e-8);
    }

    Rng rng(mix_seed({seed, 3}));
    {
        Var x(random_tensor(rng, {2, 4, 5, 5}), true);
        Var w(random_tensor(rng, {3, 4}), true);
        Var b(random_tensor(rng, {3}), true);
        const Tensor m = random_tensor(rng, {2, 3, 5, 5});
        report("layer/conv1x1",
               graph_error([&](Tape &t, const std::vector<Var> &in) {
                   return ops::weighted_sum(t, ops::conv1x1(t, in[0], in[1], in[2]), m);
               }, {x, w, b}, seed), 1e-6);
    }
    {
        Var x(random_tensor(rng, {1, 3, 6, 6}), true);
        Var dw(random_tensor(rng, {3, 3, 3}), true);
        Var pw(random_tensor(rng, {4, 3}), true);
        Var b(random_tensor(rng, {4}), true);
        const Tensor m = random_tensor(rng, {1, 4, 3, 3});
        report("layer/separable-conv-stride2",
               graph_error([&](Tape &t, const std::vector<Var> &in) {
                   return ops::weighted_sum(
                       t, ops::depthwise_separable_conv(t, in[0], in[1], in[2], in[3], 2), m);
               }, {x, dw, pw, b}, seed), 1e-6);
    }
    {
        Var x(random_tensor(rng, {1, 3, 3, 3}), true);
        Var w(random_tensor(rng, {3, 2, 2, 2}), true);
        Var b(random_tensor(rng, {2}), true);
        const Tensor m = random_tensor(rng, {1, 2, 6, 6});
        report("layer/transposed-conv",
               graph_error([&](Tape &t, const std::vector<Var> &in) {
                   return ops::weighted_sum(t, ops::transposed_conv2x(t, in[0], in[1], in[2]), m);
               }, {x, w, b}, seed), 1e-6);
    }
    {
        Var logits(random_tensor(rng, {2, 4, 3, 3}, -2, 2), true);
        LabelMap mask(2, 3, 3);
        for (auto &l : mask.labels) {
            l = static_cast<std::uint8_t>(rng.below(4));
        }
        mask.labels[4] = kIgnoreLabel;
        report("layer/cross-entropy",
               graph_error([&](Tape &t, const std::vector<Var> &in) {
                   return cross_entropy(t, in[0], mask);
               }, {logits}, seed), 1e-6);
    }
    {
        ParameterSet ps;
        dmcaf::DmcafConfig c;
        c.d = 8;
        c.heads = 2;
        c.points = 2;
        dmcaf::FusionStage st("s", 4, 6, c, ps, rng);
        st.film_out_w.mutable_value() = random_tensor(rng, st.film_out_w.shape(), -0.5, 0.5);
        st.film_out_b.mutable_value() = random_tensor(rng, st.film_out_b.shape(), -0.5, 0.5);
        st.offset_w.mutable_value() = random_tensor(rng, st.offset_w.shape(), -0.3, 0.3);
        Var u(random_tensor(rng, {1, 4, 4, 4}), true);
        Var d(random_tensor(rng, {1, 6, 4, 4}), true);
        std::vector<Var> inputs{u, d};
        for (const auto &p : ps.items()) {
            inputs.push_back(p.var);
        }
        const Tensor m = random_tensor(rng, {1, 4, 4, 4});
        report("block/dmcaf-stage",
               graph_error([&](Tape &t, const std::vector<Var> &in) {
                   return ops::weighted_sum(t, dmcaf::fusion_forward(t, in[0], in[1], st), m);
               }, inputs, seed), 1e-4);
    }
    const auto profile = quantum::QuantumProfile::for_qubits(options.n_qubits);
    {
        ParameterSet ps;
        quantum::QSkipBlock blk("q", 3, profile, ps, rng);
        Var x(random_tensor(rng, {2, 3, 4, 4}, 0.0, 1.0), true);
        std::vector<Var> inputs{x};
        for (const auto &p : ps.items()) {
            inputs.push_back(p.var);
        }
        const Tensor m = random_tensor(rng, {2, 3, 4, 4});
        report("block/qskip",
               graph_error([&](Tape &t, const std::vector<Var> &in) {
                   return ops::weighted_sum(t, quantum::qskip_refine(t, in[0], blk), m);
               }, inputs, seed, 120), 1e-3);
    }
    {
        ParameterSet ps;
        quantum::QMoEBottleneck blk("m", 3, 4, profile, ps, rng);
        Var x(random_tensor(rng, {2, 3, 4, 4}), true);
        std::vector<Var> inputs{x};
        for (const auto &p : ps.items()) {
            inputs.push_back(p.var);
        }
        const Tensor m = random_tensor(rng, {2, 4, 4, 4});
        report("block/qmoe",
               graph_error([&](Tape &t, const std::vector<Var> &in) {
                   return ops::weighted_sum(t, quantum::qmoe_bottleneck(t, in[0], blk), m);
               }, inputs, seed, 120), 1e-3);
    }
    report("network/" + std::to_string(options.network_coords) + "-parameters",
           check_network_gradients(options.network, options.network_coords, seed), 1e-3);
    return results;
}

} // namespace hqf::train
