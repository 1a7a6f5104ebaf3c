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
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
//
// usage: acceptance <path-to-hqf-cli> <work-dir>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hqf/circuits/circuits.hpp"
#include "hqf/dmcaf/dmcaf.hpp"
#include "hqf/qsim/statevector.hpp"
#include "hqf/quantum/blocks.hpp"
#include "hqf/segnet/net.hpp"
#include "hqf/tensor/error.hpp"
#include "hqf/tensor/ops.hpp"
#include "hqf/train/metrics.hpp"
#include "hqf/train/oracles.hpp"
#include "hqf/train/synth.hpp"
#include "hqf/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace hqf;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Tensor uniform_tensor(Rng &rng, Shape shape, double lo, double hi) {
    Tensor t(std::move(shape));
    for (auto &v : t.data()) v = rng.uniform(lo, hi);
    return t;
}

fs::path g_cli;
fs::path g_work;

int run_cli(const std::string &args, const fs::path &log) {
    const std::string cmd = "\"" + g_cli.string() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    return std::system(cmd.c_str());
}

std::vector<std::string> read_lines(const fs::path &p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    return out;
}

// 1 ------------------------------------------------------------------------
Verdict quantum_correctness() {
    const auto t0 = Clock::now();
    const auto grid = circuits::QubitGrid::for_qubits(16);
    double worst_norm = 0.0;
    std::size_t runs = 0;
    for (const auto &name : circuits::circuit_names()) {
        const auto spec = circuits::build_by_name(name, grid);
        Rng rng(mix_seed({fnv1a(name), 1}));
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> w(spec.n_trainable), x(spec.n_inputs);
            for (auto &v : w) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
            for (auto &v : x) v = rng.uniform(-std::numbers::pi, std::numbers::pi);
            const auto psi = qsim::run_circuit(spec, w, x);
            worst_norm = std::max(worst_norm, std::abs(psi.norm_squared() - 1.0));
            ++runs;
        }
    }
    qsim::Statevector bell(2);
    bell.apply_h(0);
    bell.apply_cnot(0, 1);
    const double r = std::numbers::sqrt2 / 2;
    const qsim::Complex want[4] = {r, 0.0, 0.0, r};
    double bell_err = 0.0;
    for (std::size_t i = 0; i < 4; ++i) bell_err = std::max(bell_err, std::abs(bell[i] - want[i]));
    const double secs = seconds_since(t0);
    return {worst_norm <= 1e-12 && bell_err <= 1e-12 && secs < 60.0,
            fmt("%zu runs at 16 qubits, max |norm-1| %.2e, Bell error %.2e, %.1f s", runs,
                worst_norm, bell_err, secs)};
}

// 2 ------------------------------------------------------------------------
Verdict gradient_oracles() {
    const auto t0 = Clock::now();
    double adj = 0.0, fd = 0.0;
    for (const auto &name : circuits::circuit_names()) {
        const auto r = train::check_circuit_gradients(name, 16, 11);
        adj = std::max(adj, r.adjoint_vs_shift);
        fd = std::max(fd, r.shift_vs_fd);
    }
    auto cfg = segnet::NetConfig::toy();
    cfg.input = 32;
    const double net_err = train::check_network_gradients(cfg, 50, 11);
    const double secs = seconds_since(t0);
    return {adj <= 1e-9 && fd <= 1e-8 && net_err <= 1e-3 && secs < 600.0,
            fmt("adjoint-vs-shift %.2e, shift-vs-fd %.2e, network (32x32, 50 params) %.2e, "
                "%.1f s",
                adj, fd, net_err, secs)};
}

// 3 ------------------------------------------------------------------------
Verdict shape_contract() {
    const auto t0 = Clock::now();
    const segnet::NetConfig cfg;
    const segnet::HqfNet net(cfg, 0);
    Rng rng(3);
    const Var image(uniform_tensor(rng, {2, 3, 224, 224}, 0.0, 1.0));
    const segnet::SyntheticProvider provider(0);
    const auto sem = net.gather_semantic(provider, {"a", "b"});
    Tape tape(false);
    quantum::ShapeTrace trace;
    const Var logits = net.forward(tape, image, sem, &trace);
    trace.add("logits", logits.shape());

    const std::size_t c_out = cfg.ladder()[4];
    const std::vector<std::pair<std::string, Shape>> want = {
        {"compressed", {2, 3, 4, 4}},
        {"z", {2, 48}},
        {"f_q", {2, 32}},
        {"X_B", {2, c_out, 14, 14}},
        {"logits", {2, cfg.classes, 224, 224}},
    };
    bool ok = true;
    std::string got;
    for (const auto &[name, shape] : want) {
        const Shape *s = trace.find(name);
        ok = ok && s != nullptr && *s == shape;
        got += " " + name + "=" + (s != nullptr ? shape_str(*s) : std::string("missing"));
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 60.0, fmt("%s, %.1f s", got.c_str() + 1, secs)};
}

// 4 ------------------------------------------------------------------------
Verdict routing_and_bounds() {
    const auto profile = quantum::QuantumProfile::for_qubits(8);
    Tape tape(false);
    double simplex = 0.0, expert_excess = 0.0, mix_excess = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        ParameterSet ps;
        Rng rng(mix_seed({4, static_cast<std::uint64_t>(trial)}));
        quantum::QMoEBottleneck block("m", 4, 3, profile, ps, rng);
        block.gate_b.mutable_value() = uniform_tensor(rng, {3}, -3.0, 3.0);
        const Var x(uniform_tensor(rng, {1, 4, 4, 4}, -2.0, 2.0));
        const Var z = quantum::compress_for_quantum(tape, x, block.compressor);
        const Var fq = quantum::quantum_descriptor(tape, z, block.enrichment,
                                                   block.enrichment_params);
        const Tensor g = quantum::qmoe_gate(tape, fq, block).value();
        std::vector<Var> experts;
        for (std::size_t k = 1; k <= 3; ++k) experts.push_back(quantum::qmoe_expert(tape, k, fq, block));
        const Tensor mix = ops::mixture(tape, Var(g), experts).value();

        simplex = std::max(simplex, std::abs(g[0] + g[1] + g[2] - 1.0));
        for (const auto &e : experts)
            for (double v : e.value().data()) expert_excess = std::max(expert_excess, std::abs(v) - 1.0);
        for (std::size_t j = 0; j < mix.numel(); ++j) {
            double lo = experts[0].value()[j], hi = lo;
            for (const auto &e : experts) {
                lo = std::min(lo, e.value()[j]);
                hi = std::max(hi, e.value()[j]);
            }
            mix_excess = std::max({mix_excess, lo - mix[j], mix[j] - hi});
        }
    }

    std::size_t qskip_violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        ParameterSet ps;
        Rng rng(mix_seed({5, static_cast<std::uint64_t>(trial)}));
        quantum::QSkipBlock block("q", 3, profile, ps, rng);
        Tensor x = uniform_tensor(rng, {1, 3, 4, 4}, 0.0, 5.0);
        x[0] = 0.0;
        const Tensor y = quantum::qskip_refine(tape, Var(x), block).value();
        for (std::size_t i = 0; i < x.numel(); ++i) {
            qskip_violations += !(x[i] <= y[i] && y[i] <= 2.0 * x[i]);
        }
    }
    const bool ok = simplex <= 1e-12 && expert_excess <= 0.0 && mix_excess <= 0.0 &&
                    qskip_violations == 0;
    return {ok, fmt("1000 trials each: gate |sum-1| %.2e, expert max |v|-1 %.2e, mixture "
                    "outside expert range by %.2e, QSkip violations %zu",
                    simplex, expert_excess, mix_excess, qskip_violations)};
}

// 5 ------------------------------------------------------------------------
Verdict metric_oracle() {
    Rng rng(5);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t k = 2 + rng.below(6);
        train::LabelMap truth(1, 16, 16), pred(1, 16, 16);
        for (auto &v : truth.labels) v = static_cast<std::uint8_t>(rng.below(k));
        for (auto &v : pred.labels) v = static_cast<std::uint8_t>(rng.below(k));
        train::ConfusionMatrix cm(k);
        cm.add(truth, pred);
        const auto m = train::compute_metrics(cm);

        std::uint64_t num = 0, den = 1, correct = 0, present = 0;
        bool ok = true;
        for (std::size_t c = 0; c < k; ++c) {
            std::uint64_t inter = 0, uni = 0;
            for (std::size_t i = 0; i < 256; ++i) {
                const bool a = truth.labels[i] == c, b = pred.labels[i] == c;
                inter += a && b;
                uni += a || b;
            }
            if (uni == 0) {
                ok = ok && std::isnan(m.iou[c]);
                continue;
            }
            ok = ok && m.iou[c] == static_cast<double>(inter) / static_cast<double>(uni);
            const std::uint64_t l = std::lcm(den, uni);
            num = num * (l / den) + inter * (l / uni);
            den = l;
            ++present;
        }
        for (std::size_t i = 0; i < 256; ++i) correct += truth.labels[i] == pred.labels[i];
        den *= present;
        const std::uint64_t g = std::gcd(num, den);
        num /= g;
        den /= g;
        ok = ok && m.miou_num == num && m.miou_den == den && m.present == present;
        ok = ok && m.miou == static_cast<double>(static_cast<long double>(num) / den);
        ok = ok && m.oa == static_cast<double>(correct) / 256.0;
        mismatches += !ok;
    }

    // 4 pixels, 2 classes: truth 0 0 1 1, prediction 0 1 1 1.
    train::LabelMap t(1, 2, 2), p(1, 2, 2);
    t.labels = {0, 0, 1, 1};
    p.labels = {0, 1, 1, 1};
    train::ConfusionMatrix cm(2);
    cm.add(t, p);
    const auto m = train::compute_metrics(cm);
    const bool worked = m.miou == 7.0 / 12.0 && m.oa == 0.75 && m.miou_num == 7 && m.miou_den == 12;
    return {mismatches == 0 && worked,
            fmt("%zu/1000 random pairs differ from pixel counting; worked example mIoU %llu/%llu "
                "= %.17g, OA %.17g",
                mismatches, static_cast<unsigned long long>(m.miou_num),
                static_cast<unsigned long long>(m.miou_den), m.miou, m.oa)};
}

// 6 ------------------------------------------------------------------------
train::RunConfig toy_run(const fs::path &data_root, std::size_t steps) {
    train::RunConfig cfg;
    cfg.net = segnet::NetConfig::toy();
    cfg.lr = 1e-3;
    cfg.batch = 4;
    cfg.seed = 7;
    cfg.steps = steps;
    cfg.data_root = data_root;
    cfg.validate();
    return cfg;
}

std::vector<double> g_step_losses;

Verdict toy_overfit() {
    const auto t0 = Clock::now();
    const auto cfg = toy_run(g_work / "synth", 300);
    const auto data = train::Dataset::load(cfg.data_root, cfg.net.classes);
    const auto provider = train::make_provider(cfg);
    segnet::HqfNet net(cfg.net, cfg.seed);
    const auto out = train::train_network(net, data, *provider, cfg);
    g_step_losses = out.step_losses;
    const double secs = seconds_since(t0);
    const double miou = out.final.metrics.miou;
    return {out.steps == 300 && miou >= 0.95 && secs <= 1800.0,
            fmt("16 images 64x64, 3 classes, seed 7, 300 steps: mIoU %.4f, OA %.2f%%, %.1f s",
                miou, 100.0 * out.final.metrics.oa, secs)};
}

// Loss trend over the first 50 steps of the same run.
Verdict loss_trend() {
    if (g_step_losses.size() < 50) return {false, "no step losses recorded"};
    std::vector<double> avg;
    for (std::size_t end = 10; end <= 50; ++end) {
        avg.push_back(std::accumulate(g_step_losses.begin() + static_cast<std::ptrdiff_t>(end - 10),
                                      g_step_losses.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
                      10.0);
    }
    std::size_t rises = 0;
    for (std::size_t i = 1; i < avg.size(); ++i) rises += avg[i] > avg[i - 1];
    return {rises == 0, fmt("10-step moving average %.4f -> %.4f, %zu increases", avg.front(),
                            avg.back(), rises)};
}

// 7 ------------------------------------------------------------------------
Verdict ablation_protocol() {
    const auto t0 = Clock::now();
    const fs::path config = g_work / "ablate.json";
    std::ofstream(config) << R"({"net.input": 64, "net.classes": 3, "net.width": 0.125,
        "quantum.n_qubits": 8, "optim.lr": 0.001, "train.batch": 4, "train.seed": 7,
        "train.steps": 20, "data.root": "synth", "report.path": "ablation.csv"})";
    const fs::path csv = g_work / "ablation.csv";
    fs::remove(csv);
    const int rc = run_cli("ablate \"" + config.string() + "\"", g_work / "ablate.log");
    const auto lines = read_lines(csv);
    if (rc != 0 || lines.size() != 7) {
        return {false, fmt("hqf ablate exit %d, %zu CSV lines", rc, lines.size())};
    }
    bool ok = lines[0] == "variant,mIoU,OA,params,seconds";
    std::size_t full_params = 0, max_reduced = 0;
    std::string names;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        ok = ok && cells.size() == 5;
        if (cells.size() != 5) break;
        const std::size_t params = std::stoull(cells[3]);
        names += (i > 1 ? " " : "") + cells[0];
        if (cells[0] == "full") {
            full_params = params;
        } else {
            max_reduced = std::max(max_reduced, params);
        }
    }
    ok = ok && full_params > max_reduced;
    return {ok, fmt("6 rows [%s], full %zu params vs largest reduced %zu, %.1f s", names.c_str(),
                    full_params, max_reduced, seconds_since(t0))};
}

// 8 ------------------------------------------------------------------------
double time_aggregate(std::size_t k, std::size_t reps) {
    const std::size_t b = 2, heads = 4, d = 64, hq = 32, wq = 32, ht = 32, wt = 32;
    Rng rng(mix_seed({8, k}));
    const Var values(uniform_tensor(rng, {b, d, ht, wt}, -1.0, 1.0));
    const Tensor ref = dmcaf::reference_points(hq, wq, ht, wt);
    const Var offsets(uniform_tensor(rng, {b, heads, k, hq, wq, 2}, -0.1, 0.1));
    Tensor w = uniform_tensor(rng, {b, heads, hq, wq, k}, 0.0, 1.0);
    for (std::size_t i = 0; i < w.numel(); i += k) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += w[i + j];
        for (std::size_t j = 0; j < k; ++j) w[i + j] /= s;
    }
    const Var weights(w);
    Tape tape(false);
    std::vector<double> times;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        const Var ctx = dmcaf::aggregate_context(tape, values, ref, offsets, weights, heads);
        times.push_back(seconds_since(t0));
        if (ctx.value().numel() == 0) return 0.0;
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

Verdict sparsity_scaling() {
    (void)time_aggregate(4, 3);
    const double t4 = time_aggregate(4, 31);
    const double t8 = time_aggregate(8, 31);
    const double ratio = t8 / t4;
    return {ratio >= 1.4 && ratio <= 2.6,
            fmt("median K=4 %.3f ms, K=8 %.3f ms, ratio %.2f", 1e3 * t4, 1e3 * t8, ratio)};
}

// 9 ------------------------------------------------------------------------
Verdict determinism() {
    const auto t0 = Clock::now();
    std::vector<std::string> finals;
    for (const char *tag : {"a", "b"}) {
        const fs::path config = g_work / (std::string("determinism_") + tag + ".json");
        std::ofstream(config) << R"({"net.input": 64, "net.classes": 3, "net.width": 0.125,
            "quantum.n_qubits": 8, "optim.lr": 0.001, "train.batch": 4, "train.seed": 7,
            "train.steps": 300, "data.root": "synth", "report.path": "determinism_)"
                              << tag << R"(.csv"})";
        const int rc = run_cli("train \"" + config.string() + "\"",
                               g_work / (std::string("determinism_") + tag + ".log"));
        const auto lines = read_lines(g_work / (std::string("determinism_") + tag + ".csv"));
        if (rc != 0 || lines.empty() || lines.back().rfind("final,", 0) != 0) {
            return {false, fmt("run %s: exit %d, no final row", tag, rc)};
        }
        finals.push_back(lines.back());
    }
    return {finals[0] == finals[1],
            fmt("final rows \"%s\" vs \"%s\", %.1f s", finals[0].c_str(), finals[1].c_str(),
                seconds_since(t0))};
}

} // namespace

int main(int argc, char **argv) {
    if (argc != 3) {
        std::fprintf(stderr, "usage: %s <hqf-cli> <work-dir>\n", argv[0]);
        return 2;
    }
    g_cli = fs::absolute(argv[1]);
    g_work = fs::absolute(argv[2]);
    fs::create_directories(g_work);
    (void)train::synth_dataset(g_work / "synth", 16, 64, 3, 7);

    const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria = {
        {"1 quantum-correctness", quantum_correctness},
        {"2 gradient-oracles", gradient_oracles},
        {"3 shape-contract", shape_contract},
        {"4 routing-and-bounds", routing_and_bounds},
        {"5 metric-oracle", metric_oracle},
        {"6 toy-overfit", toy_overfit},
        {"6b loss-trend-first-50-steps", loss_trend},
        {"7 ablation-protocol", ablation_protocol},
        {"8 dmcaf-sparsity-scaling", sparsity_scaling},
        {"9 determinism", determinism},
    };
    int failed = 0;
    for (const auto &[name, run] : criteria) {
        Verdict v;
        try {
            v = run();
        } catch (const Error &e) {
            v = {false, std::string("error: ") + e.category() + ": " + e.what()};
        } catch (const std::exception &e) {
            v = {false, std::string("error: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("%s %-30s %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu checks failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
