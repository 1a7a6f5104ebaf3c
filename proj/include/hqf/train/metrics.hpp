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

#include "hqf/train/loss.hpp"

namespace hqf::train {

/// counts[truth * n + predicted].
class ConfusionMatrix {
  public:
    explicit ConfusionMatrix(std::size_t n_classes);

    /// Accumulates every pixel whose truth is not kIgnoreLabel. Throws
    /// DataError on ids >= n_classes and on mismatched layouts.
    void add(const LabelMap &truth, const LabelMap &predicted);

    [[nodiscard]] std::size_t classes() const noexcept { return n_; }
    [[nodiscard]] std::uint64_t count(std::size_t truth, std::size_t predicted) const {
        return counts_[truth * n_ + predicted];
    }
    [[nodiscard]] std::uint64_t total() const noexcept;
    void merge(const ConfusionMatrix &other);

  private:
    std::size_t n_;
    std::vector<std::uint64_t> counts_;
};

struct Metrics {
    double miou = 0.0;
    double oa = 0.0;               ///< fraction in [0, 1]
    std::vector<double> iou;       ///< NaN where the class union is empty
    std::size_t present = 0;       ///< classes averaged into miou
    /// miou as a reduced fraction when it fits in 64 bits, else {0, 0}.
    std::uint64_t miou_num = 0;
    std::uint64_t miou_den = 0;
};

/**
 * IoU_c = TP / (TP + FP + FN), averaged over classes with a non-empty
 * union; OA = trace / total. The mean is accumulated as an exact
 * fraction, so miou is the double nearest the true ratio whenever the
 * fraction fits. Throws DataError on an empty matrix.
 */
[[nodiscard]] Metrics compute_metrics(const ConfusionMatrix &cm);

} // namespace hqf::train
