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
 * The segmentation network: a five-level depthwise-separable encoder,
 * optional semantic fusion at levels 2-4, optional quantum skip
 * recalibration, a bottleneck and a transposed-convolution decoder.
 */
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hqf/dmcaf/dmcaf.hpp"
#include "hqf/quantum/blocks.hpp"
#include "hqf/segnet/config.hpp"
#include "hqf/segnet/provider.hpp"
#include "hqf/tensor/autodiff.hpp"

namespace hqf::segnet {

/// Depthwise 3x3 (given stride) then pointwise projection and ReLU.
struct SeparableConv {
    Var depthwise;  ///< [Cin, 3, 3]
    Var pointwise;  ///< [Cout, Cin]
    Var bias;       ///< [Cout]
    std::size_t stride = 1;

    SeparableConv(const std::string &prefix, std::size_t in, std::size_t out, std::size_t stride,
                  ParameterSet &params, Rng &rng);
};

/// Two separable convolutions; the first may downsample.
struct ConvBlock {
    SeparableConv first;
    SeparableConv second;

    ConvBlock(const std::string &prefix, std::size_t in, std::size_t out, std::size_t stride,
              ParameterSet &params, Rng &rng);
};

Var conv_block_forward(Tape &tape, const Var &x, const ConvBlock &block);

/// 1x1 projection of a semantic map to C channels, bilinearly resized to h x w.
Var project_semantic(Tape &tape, const Var &d, const Var &w, const Var &b, std::size_t h,
                     std::size_t width);

/// F = U + D' (add) or U * D' (mul); D' already matches U's shape.
Var baseline_fuse(Tape &tape, const Var &u, const Var &d_proj, Fusion mode);

class HqfNet {
  public:
    HqfNet(const NetConfig &cfg, std::uint64_t seed);
    HqfNet(const HqfNet &) = delete;
    HqfNet &operator=(const HqfNet &) = delete;

    /**
     * image [B,3,H,W] -> logits [B,classes,H,W]. `semantic` holds one
     * [B,C_t,h,w] map per fused level (see semantic_geometry), and may be
     * empty when fusion is off. Shapes are appended to `trace` if given.
     */
    Var forward(Tape &tape, const Var &image, const std::vector<Tensor> &semantic,
                quantum::ShapeTrace *trace = nullptr) const;

    struct Encoded {
        std::array<Var, 5> levels;  ///< after fusion at the fused levels
        std::array<Var, 4> skips;   ///< what the decoder concatenates
    };

    /// Encoder, fusion and skip refinement; forward continues from here.
    Encoded encode(Tape &tape, const Var &image, const std::vector<Tensor> &semantic,
                   quantum::ShapeTrace *trace = nullptr) const;

    /// Geometry of the semantic map expected at each fused level.
    [[nodiscard]] std::vector<FeatureGeometry> semantic_geometry() const;
    /// Batches provider output for `ids` in the order forward expects.
    [[nodiscard]] std::vector<Tensor> gather_semantic(const SemanticFeatureProvider &provider,
                                                      const std::vector<std::string> &ids) const;

    [[nodiscard]] const NetConfig &config() const noexcept { return cfg_; }
    [[nodiscard]] ParameterSet &parameters() noexcept { return params_; }
    [[nodiscard]] const ParameterSet &parameters() const noexcept { return params_; }
    [[nodiscard]] std::size_t parameter_count() const { return params_.scalar_count(); }

  private:
    struct BaselineProjection {
        Var w;  ///< [C, C_t]
        Var b;  ///< [C]
    };

    Var fuse_level(Tape &tape, std::size_t slot, const Var &u, const Tensor &semantic) const;

    NetConfig cfg_;
    ParameterSet params_;
    std::vector<ConvBlock> encoder_;  // levels 0..4
    std::vector<std::optional<dmcaf::FusionStage>> dmcaf_;
    std::vector<std::optional<BaselineProjection>> baseline_;
    std::vector<std::optional<quantum::QSkipBlock>> qskip_;  // levels 0..3
    std::vector<ConvBlock> bottleneck_;  // exactly one
    std::optional<quantum::QMoEBottleneck> qmoe_;
    std::vector<Var> up_w_;  // level 3..0 order: [C_{l+1}, C_l, 2, 2]
    std::vector<Var> up_b_;
    std::vector<ConvBlock> decoder_;
    Var head_w_;
    Var head_b_;
};

} // namespace hqf::segnet
