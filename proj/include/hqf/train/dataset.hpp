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
 * Image/mask pairs from `root/images/<stem>.png` and
 * `root/masks/<stem>.png`, and the seeded batch stream over them.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hqf/tensor/tensor.hpp"
#include "hqf/train/image_io.hpp"
#include "hqf/train/loss.hpp"

namespace hqf::train {

struct SampleRecord {
    std::string stem;
    std::filesystem::path image;
    std::filesystem::path mask;
    std::string split = "train";
};

/// Pairs files by stem, sorted by stem. Unpaired files are a DataError
/// that lists every offender.
[[nodiscard]] std::vector<SampleRecord> scan_dataset(const std::filesystem::path &root);

struct Sample {
    std::string id;
    Image image;  ///< RGB
    Image mask;   ///< 1-channel class ids, kIgnoreLabel allowed
};

class Dataset {
  public:
    Dataset(std::vector<Sample> samples, std::size_t classes);

    /// Reads and validates every pair: equal sizes, ids < classes (or the
    /// ignore label). Problems across all files are reported together.
    static Dataset load(const std::filesystem::path &root, std::size_t classes);

    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] const Sample &operator[](std::size_t i) const { return samples_[i]; }
    [[nodiscard]] std::size_t classes() const noexcept { return classes_; }

  private:
    std::vector<Sample> samples_;
    std::size_t classes_;
};

enum class SampleMode { Crop, Resize };

struct Batch {
    Tensor images;  ///< [B, 3, S, S], values in [0, 1]
    LabelMap masks;
    std::vector<std::string> ids;
};

/// Top-left corner of a crop.
struct CropOrigin {
    std::size_t y = 0;
    std::size_t x = 0;
};

/// Crop position drawn from Rng(seed, epoch, sample index).
[[nodiscard]] CropOrigin random_crop_origin(const Sample &s, std::size_t size,
                                            std::uint64_t seed, std::size_t epoch,
                                            std::size_t index);
/// Centred crop, used for evaluation.
[[nodiscard]] CropOrigin center_crop_origin(const Sample &s, std::size_t size);

/// Writes sample `s` into slot `slot` of `batch`, either cropped at
/// `origin` or resized (bilinear image, nearest-neighbour mask).
void fill_slot(Batch &batch, std::size_t slot, const Sample &s, std::size_t size,
               SampleMode mode, CropOrigin origin);

/// Epoch permutation of [0, n) drawn from Rng(seed, epoch).
[[nodiscard]] std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed,
                                                   std::size_t epoch);

/// Evaluation batch over `indices`: centred crops or resizes, no shuffling.
[[nodiscard]] Batch eval_batch(const Dataset &data, std::span<const std::size_t> indices,
                               std::size_t size, SampleMode mode);

/**
 * Endless training stream: shuffled epochs, random crops, last batch of an
 * epoch may be short. Everything depends only on (seed, epoch, index).
 */
class BatchStream {
  public:
    BatchStream(const Dataset &data, std::size_t batch, std::size_t size, SampleMode mode,
                std::uint64_t seed);

    Batch next();
    /// Epoch of the batch that next() returns.
    [[nodiscard]] std::size_t epoch() const noexcept { return epoch_; }

  private:
    const Dataset &data_;
    std::size_t batch_;
    std::size_t size_;
    SampleMode mode_;
    std::uint64_t seed_;
    std::size_t epoch_ = 0;
    std::size_t pos_ = 0;
    std::vector<std::size_t> order_;
};

} // namespace hqf::train
