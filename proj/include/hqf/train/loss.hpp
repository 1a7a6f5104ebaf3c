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
#include <cstdint>
#include <vector>

#include "hqf/tensor/autodiff.hpp"

namespace hqf::train {

/// Pixels carrying this label are skipped by the loss and the metrics.
inline constexpr std::uint8_t kIgnoreLabel = 255;

/// Class ids for a [batch, height, width] block, row-major.
struct LabelMap {
    std::size_t batch = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> labels;

    LabelMap() = default;
    LabelMap(std::size_t b, std::size_t h, std::size_t w, std::uint8_t fill = 0)
        : batch(b), height(h), width(w), labels(b * h * w, fill) {}

    [[nodiscard]] std::uint8_t &at(std::size_t b, std::size_t y, std::size_t x) {
        return labels[(b * height + y) * width + x];
    }
    [[nodiscard]] std::uint8_t at(std::size_t b, std::size_t y, std::size_t x) const {
        return labels[(b * height + y) * width + x];
    }
};

/**
 * Mean over non-ignored pixels of -log softmax(logits)[label], with the
 * softmax taken over the class axis of [B, C, H, W] logits. Throws
 * DataError on a label >= C that is not kIgnoreLabel, and when every pixel
 * is ignored.
 */
Var cross_entropy(Tape &tape, const Var &logits, const LabelMap &mask);

/// Per-pixel argmax over classes; ties go to the lower class id.
[[nodiscard]] LabelMap argmax_labels(const Tensor &logits);

} // namespace hqf::train
