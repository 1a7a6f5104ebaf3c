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
#include <filesystem>
#include <vector>

#include "hqf/train/dataset.hpp"

namespace hqf::train {

inline constexpr double kMinClassShare = 0.05;
inline constexpr double kMaxClassShare = 0.60;

/// One synthetic image with its exact mask.
struct SynthSample {
    Image image;
    Image mask;
};

/**
 * Draws sample `index`: class 0 is background, every other class paints
 * one to three rectangles, disks or stripe bands in its own colour, with
 * mild pixel noise. Layouts are redrawn until every class covers between
 * 5% and 60% of the pixels.
 */
[[nodiscard]] SynthSample synth_sample(std::size_t index, std::size_t size, std::size_t classes,
                                       std::uint64_t seed);

/// Writes n samples to out_dir/{images,masks}/synth_NNNN.png.
std::vector<SampleRecord> synth_dataset(const std::filesystem::path &out_dir, std::size_t n,
                                        std::size_t size, std::size_t classes,
                                        std::uint64_t seed);

} // namespace hqf::train
