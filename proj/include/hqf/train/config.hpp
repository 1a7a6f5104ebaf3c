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
 * Run configuration: a flat JSON object with dotted keys. Unknown keys,
 * wrong types and out-of-range values are ConfigErrors.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hqf/segnet/config.hpp"

namespace hqf::train {

enum class ProviderMode { Synthetic, File };

struct RunConfig {
    segnet::NetConfig net = segnet::NetConfig::toy();

    ProviderMode provider_mode = ProviderMode::Synthetic;
    std::uint64_t provider_seed = 0;
    std::filesystem::path provider_manifest;

    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    std::size_t epochs = 1;
    std::size_t batch = 4;
    std::uint64_t seed = 0;
    /// When set, training stops after this many optimizer steps and the
    /// epoch count is ignored.
    std::optional<std::size_t> steps;
    std::filesystem::path checkpoint;

    std::filesystem::path data_root;
    /// Training samples are random crops of this size, or whole images
    /// resized to it. Exactly one is active and it equals net.input.
    bool resize = false;

    std::filesystem::path report;

    /// Throws ConfigError on inconsistent fields.
    void validate() const;
    /// Optimizer steps in one epoch over `samples` items.
    [[nodiscard]] std::size_t steps_per_epoch(std::size_t samples) const;
    /// Total steps: `steps` if set, otherwise epochs * steps_per_epoch.
    [[nodiscard]] std::size_t total_steps(std::size_t samples) const;
};

/// Parses JSON text. Relative paths are resolved against `base_dir`.
[[nodiscard]] RunConfig parse_run_config(const std::string &json_text,
                                         const std::filesystem::path &base_dir = {});
/// Reads a config file; relative paths resolve against its directory.
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path &path);

} // namespace hqf::train
