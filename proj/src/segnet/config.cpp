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
#include "hqf/segnet/config.hpp"

#include <cmath>

#include "hqf/tensor/error.hpp"

namespace hqf::segnet {

std::string_view fusion_name(Fusion f) noexcept {
    switch (f) {
    case Fusion::None:
        return "none";
    case Fusion::Add:
        return "add";
    case Fusion::Mul:
        return "mul";
    case Fusion::Dmcaf:
        return "dmcaf";
    }
    return "?";
}

Fusion parse_fusion(std::string_view name) {
    for (const Fusion f : {Fusion::None, Fusion::Add, Fusion::Mul, Fusion::Dmcaf}) {
        if (fusion_name(f) == name) {
            return f;
        }
    }
    throw ConfigError("unknown fusion mode \"" + std::string(name) +
                      "\" (expected none, add, mul or dmcaf)");
}

std::vector<NamedVariant> ablation_ladder() {
    return {
        {"mul", {Fusion::Mul, false, false}},
        {"add", {Fusion::Add, false, false}},
        {"dmcaf", {Fusion::Dmcaf, false, false}},
        {"dmcaf+qskip", {Fusion::Dmcaf, true, false}},
        {"dmcaf+qmoe", {Fusion::Dmcaf, false, true}},
        {"full", {Fusion::Dmcaf, true, true}},
    };
}

NetConfig NetConfig::toy() {
    NetConfig cfg;
    cfg.input = 64;
    cfg.classes = 3;
    cfg.width = 0.125;
    cfg.n_qubits = 8;
    return cfg;
}

std::array<std::size_t, 5> NetConfig::ladder() const {
    std::array<std::size_t, 5> out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double c = std::round(static_cast<double>(kBaseLadder[i]) * width);
        out[i] = c < 1.0 ? 1 : static_cast<std::size_t>(c);
    }
    return out;
}

void NetConfig::validate() const {
    if (input == 0 || input % 16 != 0) {
        throw ConfigError("net.input must be a positive multiple of 16, got " +
                          std::to_string(input));
    }
    if (classes < 2) {
        throw ConfigError("net.classes must be at least 2");
    }
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw ConfigError("net.width must be positive");
    }
    if (n_qubits != 8 && n_qubits != 16) {
        throw ConfigError("quantum.n_qubits must be 8 or 16, got " + std::to_string(n_qubits));
    }
    if (patch == 0) {
        throw ConfigError("provider.patch must be positive");
    }
    try {
        dmcaf.validate();
    } catch (const ValueError &e) {
        throw ConfigError(e.what());
    }
    if (variant.fusion == Fusion::None) {
        return;
    }
    for (const auto level : kFusedLevels) {
        const std::size_t size = level_size(level);
        if (size % patch != 0) {
            throw ConfigError("encoder level " + std::to_string(level) + " size " +
                              std::to_string(size) + " is not divisible by provider.patch " +
                              std::to_string(patch));
        }
        if (variant.fusion == Fusion::Dmcaf && size % dmcaf.stride != 0) {
            throw ConfigError("encoder level " + std::to_string(level) + " size " +
                              std::to_string(size) + " is not divisible by dmcaf.stride " +
                              std::to_string(dmcaf.stride));
        }
    }
}

} // namespace hqf::segnet
