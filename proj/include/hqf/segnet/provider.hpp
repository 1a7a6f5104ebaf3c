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
 * Frozen sources of per-stage semantic feature maps. Nothing here is
 * trainable: providers hand out plain tensors.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hqf/tensor/tensor.hpp"

namespace hqf::segnet {

/// Expected [channels, height, width] of one semantic map.
struct FeatureGeometry {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    [[nodiscard]] Shape shape() const { return {channels, height, width}; }
};

class SemanticFeatureProvider {
  public:
    virtual ~SemanticFeatureProvider() = default;

    /// [C, H, W] for `sample_id` at encoder level `level`. Throws DataError
    /// when the map does not match `expected`.
    [[nodiscard]] virtual Tensor features(const std::string &sample_id, std::size_t level,
                                          const FeatureGeometry &expected) const = 0;
};

/**
 * Smooth pseudo-random fields: each channel is a sum of a few low-frequency
 * cosines whose coefficients come from an Rng seeded by
 * (seed, fnv1a(sample_id), level).
 */
class SyntheticProvider final : public SemanticFeatureProvider {
  public:
    static constexpr std::size_t kTerms = 3;
    static constexpr int kMaxFrequency = 2;

    explicit SyntheticProvider(std::uint64_t seed) : seed_(seed) {}

    [[nodiscard]] Tensor features(const std::string &sample_id, std::size_t level,
                                  const FeatureGeometry &expected) const override;

  private:
    std::uint64_t seed_;
};

/**
 * Reads HQFT files listed in a JSON manifest of the form
 * {"<sample id>": {"2": "path", "3": "path", "4": "path"}}.
 * Relative paths resolve against the manifest's directory.
 */
class FileProvider final : public SemanticFeatureProvider {
  public:
    explicit FileProvider(const std::filesystem::path &manifest);

    [[nodiscard]] Tensor features(const std::string &sample_id, std::size_t level,
                                  const FeatureGeometry &expected) const override;

    [[nodiscard]] std::size_t sample_count() const noexcept { return entries_.size(); }

  private:
    std::map<std::string, std::map<std::size_t, std::filesystem::path>> entries_;
};

/// "HQFT", rank u32, dims u32, f32 row-major data, all little-endian.
void write_feature_file(const std::filesystem::path &path, const Tensor &t);
[[nodiscard]] Tensor read_feature_file(const std::filesystem::path &path);

} // namespace hqf::segnet
