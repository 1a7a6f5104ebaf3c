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
#include "hqf/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "hqf/tensor/error.hpp"
#include "hqf/train/adam.hpp"
#include "hqf/train/checkpoint.hpp"
#include "hqf/train/loss.hpp"

namespace hqf::train {

namespace {

std::size_t counted_pixels(const LabelMap &m) {
    return static_cast<std::size_t>(
        std::count_if(m.labels.begin(), m.labels.end(), [](auto v) { return v != kIgnoreLabel; }));
}

std::ofstream open_report(const std::filesystem::path &path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write report " + path.string());
    }
    return out;
}

} // namespace

std::string format_metric(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10f", v);
    return buf;
}

std::unique_ptr<segnet::SemanticFeatureProvider> make_provider(const RunConfig &cfg) {
    if (cfg.provider_mode == ProviderMode::File) {
        return std::make_unique<segnet::FileProvider>(cfg.provider_manifest);
    }
    return std::make_unique<segnet::SyntheticProvider>(cfg.provider_seed);
}

SampleMode sample_mode(const RunConfig &cfg) noexcept {
    return cfg.resize ? SampleMode::Resize : SampleMode::Crop;
}

EvalResult evaluate_network(const segnet::HqfNet &net, const Dataset &data,
                            const segnet::SemanticFeatureProvider &provider,
                            const RunConfig &cfg) {
    ConfusionMatrix cm(net.config().classes);
    double loss_sum = 0.0;
    std::size_t pixels = 0;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < data.size(); start += cfg.batch) {
        idx.clear();
        for (std::size_t i = start; i < std::min(data.size(), start + cfg.batch); ++i) {
            idx.push_back(i);
        }
        const Batch b = eval_batch(data, idx, net.config().input, sample_mode(cfg));
        Tape tape(false);
        const Var logits =
            net.forward(tape, Var(b.images), net.gather_semantic(provider, b.ids));
        const std::size_t n = counted_pixels(b.masks);
        if (n > 0) {
            loss_sum += cross_entropy(tape, logits, b.masks).value()[0] * static_cast<double>(n);
            pixels += n;
        }
        cm.add(b.masks, argmax_labels(logits.value()));
    }
    EvalResult out;
    out.metrics = compute_metrics(cm);
    out.loss = pixels > 0 ? loss_sum / static_cast<double>(pixels) : 0.0;
    return out;
}

TrainOutcome train_network(segnet::HqfNet &net, const Dataset &data,
                           const segnet::SemanticFeatureProvider &provider, const RunConfig &cfg,
                           const ProgressFn &progress) {
    if (data.classes() != net.config().classes) {
        throw ConfigError("dataset has " + std::to_string(data.classes()) +
                          " classes, network expects " + std::to_string(net.config().classes));
    }
    Adam adam(net.parameters(), {cfg.lr, cfg.beta1, cfg.beta2, cfg.eps});
    BatchStream stream(data, cfg.batch, net.config().input, sample_mode(cfg), cfg.seed);
    const std::size_t total = cfg.total_steps(data.size());

    TrainOutcome out;
    ConfusionMatrix epoch_cm(net.config().classes);
    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;
    const auto close_epoch = [&](std::size_t epoch) {
        const Metrics m = compute_metrics(epoch_cm);
        EpochRow row{std::to_string(epoch + 1), out.steps,
                     epoch_loss / static_cast<double>(epoch_steps), m.miou, m.oa};
        out.rows.push_back(row);
        if (progress) {
            progress(row);
        }
        epoch_cm = ConfusionMatrix(net.config().classes);
        epoch_loss = 0.0;
        epoch_steps = 0;
    };

    for (std::size_t step = 0; step < total; ++step) {
        const std::size_t epoch = stream.epoch();
        const Batch b = stream.next();
        Tape tape;
        net.parameters().zero_grad();
        const Var logits =
            net.forward(tape, Var(b.images), net.gather_semantic(provider, b.ids));
        Var loss = cross_entropy(tape, logits, b.masks);
        tape.backward(loss);
        adam.step();

        const double l = loss.value()[0];
        if (!std::isfinite(l)) {
            throw NumericError("training loss became non-finite at step " +
                               std::to_string(step + 1));
        }
        out.step_losses.push_back(l);
        ++out.steps;
        epoch_cm.add(b.masks, argmax_labels(logits.value()));
        epoch_loss += l;
        ++epoch_steps;
        if (stream.epoch() != epoch || step + 1 == total) {
            close_epoch(epoch);
        }
    }

    snap_to_checkpoint_precision(net.parameters());
    out.final = evaluate_network(net, data, provider, cfg);
    EpochRow last{"final", out.steps, out.final.loss, out.final.metrics.miou,
                  out.final.metrics.oa};
    out.rows.push_back(last);
    if (progress) {
        progress(last);
    }
    return out;
}

void write_train_csv(const std::filesystem::path &path, const std::vector<EpochRow> &rows) {
    auto out = open_report(path);
    out << "epoch,step,loss,mIoU,OA\n";
    for (const auto &r : rows) {
        out << r.epoch << ',' << r.step << ',' << format_metric(r.loss) << ','
            << format_metric(r.miou) << ',' << format_metric(100.0 * r.oa) << '\n';
    }
    if (!out) {
        throw IoError("write failed for report " + path.string());
    }
}

std::vector<AblationRow> run_ablation(const Dataset &data,
                                      const segnet::SemanticFeatureProvider &provider,
                                      const RunConfig &cfg,
                                      const std::function<void(const AblationRow &)> &progress) {
    std::vector<AblationRow> rows;
    for (const auto &nv : segnet::ablation_ladder()) {
        RunConfig run = cfg;
        run.net.variant = nv.variant;
        const auto t0 = std::chrono::steady_clock::now();
        segnet::HqfNet net(run.net, run.seed);
        const std::size_t params = net.parameter_count();
        const TrainOutcome r = train_network(net, data, provider, run);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back({nv.name, r.final.metrics.miou, r.final.metrics.oa, params, secs});
        if (progress) {
            progress(rows.back());
        }
    }
    return rows;
}

void write_ablation_csv(const std::filesystem::path &path, const std::vector<AblationRow> &rows) {
    auto out = open_report(path);
    out << "variant,mIoU,OA,params,seconds\n";
    char secs[32];
    for (const auto &r : rows) {
        std::snprintf(secs, sizeof(secs), "%.3f", r.seconds);
        out << r.variant << ',' << format_metric(r.miou) << ',' << format_metric(100.0 * r.oa)
            << ',' << r.params << ',' << secs << '\n';
    }
    if (!out) {
        throw IoError("write failed for report " + path.string());
    }
}

} // namespace hqf::train
