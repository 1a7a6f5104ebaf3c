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
#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hqf/segnet/net.hpp"
#include "hqf/train/config.hpp"
#include "hqf/train/dataset.hpp"
#include "hqf/train/metrics.hpp"

namespace hqf::train {

/// One row of the training report: epoch,step,loss,mIoU,OA.
struct EpochRow {
    std::string epoch;  ///< 1-based epoch number, or "final"
    std::size_t step = 0;
    double loss = 0.0;
    double miou = 0.0;
    double oa = 0.0;  ///< fraction; written as a percentage
};

struct EvalResult {
    Metrics metrics;
    double loss = 0.0;  ///< mean over evaluated pixels
};

struct TrainOutcome {
    std::vector<EpochRow> rows;
    std::vector<double> step_losses;
    EvalResult final;
    std::size_t steps = 0;
};

using ProgressFn = std::function<void(const EpochRow &)>;

[[nodiscard]] std::unique_ptr<segnet::SemanticFeatureProvider>
make_provider(const RunConfig &cfg);

[[nodiscard]] SampleMode sample_mode(const RunConfig &cfg) noexcept;

/**
 * Adam on cross-entropy for cfg.total_steps(). Per-epoch rows report the
 * mean step loss and metrics over that epoch's training batches. After the
 * last step the weights are rounded to checkpoint precision and the whole
 * dataset is evaluated for the "final" row.
 */
TrainOutcome train_network(segnet::HqfNet &net, const Dataset &data,
                           const segnet::SemanticFeatureProvider &provider, const RunConfig &cfg,
                           const ProgressFn &progress = {});

/// Centred crops (or resizes), in index order, without recording a tape.
[[nodiscard]] EvalResult evaluate_network(const segnet::HqfNet &net, const Dataset &data,
                                          const segnet::SemanticFeatureProvider &provider,
                                          const RunConfig &cfg);

void write_train_csv(const std::filesystem::path &path, const std::vector<EpochRow> &rows);

struct AblationRow {
    std::string variant;
    double miou = 0.0;
    double oa = 0.0;
    std::size_t params = 0;
    double seconds = 0.0;
};

/// Trains and evaluates every ablation variant with the same data, seed
/// and schedule. Only the variant flags of cfg.net are overridden.
std::vector<AblationRow> run_ablation(const Dataset &data,
                                      const segnet::SemanticFeatureProvider &provider,
                                      const RunConfig &cfg,
                                      const std::function<void(const AblationRow &)> &progress = {});

void write_ablation_csv(const std::filesystem::path &path, const std::vector<AblationRow> &rows);

/// Fixed-precision text used for metrics in every CSV.
[[nodiscard]] std::string format_metric(double v);

} // namespace hqf::train
