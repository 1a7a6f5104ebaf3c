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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hqf/dmcaf/dmcaf.hpp"

namespace hqf::segnet {

/// How semantic features enter the encoder.
enum class Fusion { None, Add, Mul, Dmcaf };

[[nodiscard]] std::string_view fusion_name(Fusion f) noexcept;
/// "none", "add", "mul" or "dmcaf"; anything else is a ConfigError.
[[nodiscard]] Fusion parse_fusion(std::string_view name);

struct Variant {
    Fusion fusion = Fusion::Dmcaf;
    bool qskip = true;
    bool qmoe = true;
};

struct NamedVariant {
    std::string name;
    Variant variant;
};

/// The six ablation rows, from the multiplicative baseline up to the full model.
[[nodiscard]] std::vector<NamedVariant> ablation_ladder();

struct NetConfig {
    static constexpr std::array<std::size_t, 5> kBaseLadder{64, 128, 256, 512, 1024};
    /// Encoder levels that receive semantic features.
    static constexpr std::array<std::size_t, 3> kFusedLevels{2, 3, 4};

    std::size_t input = 224;
    std::size_t classes = 5;
    double width = 1.0;
    Variant variant;
    std::size_t n_qubits = 16;
    dmcaf::DmcafConfig dmcaf;
    /// Semantic maps are this many times coarser than their encoder level.
    std::size_t patch = 2;

    /// 64x64, width 0.125, 8 qubits, 3 classes.
    static NetConfig toy();

    /// Channel count per level: max(1, round(base * width)).
    [[nodiscard]] std::array<std::size_t, 5> ladder() const;
    /// Spatial size of encoder level 0..4.
    [[nodiscard]] std::size_t level_size(std::size_t level) const noexcept {
        return input >> level;
    }
    /// Channel count of every semantic map.
    [[nodiscard]] std::size_t semantic_channels() const { return ladder()[4]; }
    [[nodiscard]] std::size_t semantic_size(std::size_t level) const noexcept {
        return level_size(level) / patch;
    }

    /// Throws ConfigError on any inconsistent field.
    void validate() const;
};

} // namespace hqf::segnet
