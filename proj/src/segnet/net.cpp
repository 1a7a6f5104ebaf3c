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
#include "hqf/segnet/net.hpp"

#include "hqf/tensor/error.hpp"
#include "hqf/tensor/init.hpp"
#include "hqf/tensor/ops.hpp"

namespace hqf::segnet {

namespace {

std::string level_name(const std::string &prefix, std::size_t level) {
    return prefix + "." + std::to_string(level);
}

} // namespace

SeparableConv::SeparableConv(const std::string &prefix, std::size_t in, std::size_t out,
                             std::size_t stride_, ParameterSet &params, Rng &rng)
    : stride(stride_) {
    // Depthwise taps keep the variance of their 9-pixel window.
    depthwise = params.add(prefix + ".dw", init::uniform({in, 3, 3}, 1.0 / std::sqrt(3.0), rng));
    pointwise = params.add(prefix + ".pw", init::he_uniform({out, in}, in, rng));
    bias = params.add(prefix + ".b", Tensor({out}));
}

ConvBlock::ConvBlock(const std::string &prefix, std::size_t in, std::size_t out,
                     std::size_t stride, ParameterSet &params, Rng &rng)
    : first(prefix + ".a", in, out, stride, params, rng),
      second(prefix + ".b", out, out, 1, params, rng) {}

Var conv_block_forward(Tape &tape, const Var &x, const ConvBlock &block) {
    const auto apply = [&tape](const Var &in, const SeparableConv &c) {
        return ops::relu(tape, ops::depthwise_separable_conv(tape, in, c.depthwise, c.pointwise,
                                                             c.bias, c.stride));
    };
    return apply(apply(x, block.first), block.second);
}

Var project_semantic(Tape &tape, const Var &d, const Var &w, const Var &b, std::size_t h,
                     std::size_t width) {
    return ops::bilinear_upsample(tape, ops::conv1x1(tape, d, w, b), h, width);
}

Var baseline_fuse(Tape &tape, const Var &u, const Var &d_proj, Fusion mode) {
    switch (mode) {
    case Fusion::Add:
        return ops::add(tape, u, d_proj);
    case Fusion::Mul:
        return ops::mul(tape, u, d_proj);
    default:
        throw ValueError("baseline_fuse: mode must be add or mul, got " +
                         std::string(fusion_name(mode)));
    }
}

HqfNet::HqfNet(const NetConfig &cfg, std::uint64_t seed) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(seed);
    const auto ch = cfg_.ladder();
    const std::size_t ct = cfg_.semantic_channels();
    const auto profile = quantum::QuantumProfile::for_qubits(cfg_.n_qubits);

    encoder_.emplace_back("enc.0", 3, ch[0], 1, params_, rng);
    for (std::size_t l = 1; l < 5; ++l) {
        encoder_.emplace_back(level_name("enc", l), ch[l - 1], ch[l], 2, params_, rng);
    }

    for (const auto level : NetConfig::kFusedLevels) {
        const std::string prefix = level_name("fuse", level);
        switch (cfg_.variant.fusion) {
        case Fusion::None:
            dmcaf_.emplace_back();
            baseline_.emplace_back();
            break;
        case Fusion::Dmcaf:
            dmcaf_.emplace_back(std::in_place, prefix, ch[level], ct, cfg_.dmcaf, params_, rng);
            baseline_.emplace_back();
            break;
        case Fusion::Add:
        case Fusion::Mul: {
            const double b0 = cfg_.variant.fusion == Fusion::Mul ? 1.0 : 0.0;
            BaselineProjection p;
            p.w = params_.add(prefix + ".w", init::fan_in_uniform({ch[level], ct}, ct, rng));
            p.b = params_.add(prefix + ".b", Tensor({ch[level]}, b0));
            dmcaf_.emplace_back();
            baseline_.emplace_back(std::move(p));
            break;
        }
        }
    }

    for (std::size_t l = 0; l < 4; ++l) {
        if (cfg_.variant.qskip) {
            qskip_.emplace_back(std::in_place, level_name("qskip", l), ch[l], profile, params_,
                                rng);
        } else {
            qskip_.emplace_back();
        }
    }

    bottleneck_.emplace_back("bottleneck", ch[4], ch[4], 1, params_, rng);
    if (cfg_.variant.qmoe) {
        qmoe_.emplace("qmoe", ch[4], ch[4], profile, params_, rng);
    }

    for (std::size_t l = 4; l-- > 0;) {
        up_w_.push_back(params_.add(level_name("up", l) + ".w",
                                    init::fan_in_uniform({ch[l + 1], ch[l], 2, 2}, ch[l + 1], rng)));
        up_b_.push_back(params_.add(level_name("up", l) + ".b", Tensor({ch[l]})));
        decoder_.emplace_back(level_name("dec", l), 2 * ch[l], ch[l], 1, params_, rng);
    }
    head_w_ = params_.add("head.w", init::fan_in_uniform({cfg_.classes, ch[0]}, ch[0], rng));
    head_b_ = params_.add("head.b", Tensor({cfg_.classes}));
}

std::vector<FeatureGeometry> HqfNet::semantic_geometry() const {
    std::vector<FeatureGeometry> out;
    if (cfg_.variant.fusion == Fusion::None) {
        return out;
    }
    for (const auto level : NetConfig::kFusedLevels) {
        out.push_back({cfg_.semantic_channels(), cfg_.semantic_size(level),
                       cfg_.semantic_size(level)});
    }
    return out;
}

std::vector<Tensor> HqfNet::gather_semantic(const SemanticFeatureProvider &provider,
                                            const std::vector<std::string> &ids) const {
    const auto geometry = semantic_geometry();
    std::vector<Tensor> out;
    for (std::size_t s = 0; s < geometry.size(); ++s) {
        const auto &g = geometry[s];
        const std::size_t plane = g.channels * g.height * g.width;
        Tensor batch({ids.size(), g.channels, g.height, g.width});
        for (std::size_t b = 0; b < ids.size(); ++b) {
            const Tensor one = provider.features(ids[b], NetConfig::kFusedLevels[s], g);
            std::copy(one.data().begin(), one.data().end(), batch.raw() + b * plane);
        }
        out.push_back(std::move(batch));
    }
    return out;
}

Var HqfNet::fuse_level(Tape &tape, std::size_t slot, const Var &u, const Tensor &semantic) const {
    const Var d(semantic);
    if (dmcaf_[slot]) {
        return dmcaf::fusion_forward(tape, u, d, *dmcaf_[slot]);
    }
    const auto &p = *baseline_[slot];
    const Var dp = project_semantic(tape, d, p.w, p.b, u.shape()[2], u.shape()[3]);
    return baseline_fuse(tape, u, dp, cfg_.variant.fusion);
}

HqfNet::Encoded HqfNet::encode(Tape &tape, const Var &image,
                               const std::vector<Tensor> &semantic,
                               quantum::ShapeTrace *trace) const {
    const Shape &in = image.shape();
    if (in.size() != 4) {
        throw DimensionError("HqfNet::forward", "rank", 4, in.size());
    }
    if (in[1] != 3) {
        throw DimensionError("HqfNet::forward", "channels", 3, in[1]);
    }
    if (in[2] != cfg_.input) {
        throw DimensionError("HqfNet::forward", "height", cfg_.input, in[2]);
    }
    if (in[3] != cfg_.input) {
        throw DimensionError("HqfNet::forward", "width", cfg_.input, in[3]);
    }
    const auto geometry = semantic_geometry();
    if (semantic.size() != geometry.size()) {
        throw DimensionError("HqfNet::forward", "semantic maps", geometry.size(),
                             semantic.size());
    }
    for (std::size_t s = 0; s < geometry.size(); ++s) {
        Shape want = geometry[s].shape();
        want.insert(want.begin(), in[0]);
        if (semantic[s].shape() != want) {
            throw DimensionError("HqfNet::forward", "semantic level " +
                                                        std::to_string(NetConfig::kFusedLevels[s]),
                                 "expected " + shape_str(want) + ", got " +
                                     shape_str(semantic[s].shape()));
        }
    }
    const auto note = [trace](const std::string &name, const Var &v) {
        if (trace != nullptr) {
            trace->add(name, v.shape());
        }
    };

    Encoded enc;
    auto &levels = enc.levels;
    Var x = image;
    for (std::size_t l = 0; l < 5; ++l) {
        x = conv_block_forward(tape, x, encoder_[l]);
        levels[l] = x;
        note(level_name("U", l), x);
    }
    for (std::size_t s = 0; s < geometry.size(); ++s) {
        const std::size_t l = NetConfig::kFusedLevels[s];
        levels[l] = fuse_level(tape, s, levels[l], semantic[s]);
        note(level_name("F", l), levels[l]);
    }

    for (std::size_t l = 0; l < 4; ++l) {
        enc.skips[l] = qskip_[l] ? quantum::qskip_refine(tape, levels[l], *qskip_[l]) : levels[l];
    }
    note("X", levels[4]);
    return enc;
}

Var HqfNet::forward(Tape &tape, const Var &image, const std::vector<Tensor> &semantic,
                    quantum::ShapeTrace *trace) const {
    const Encoded enc = encode(tape, image, semantic, trace);
    const auto &skips = enc.skips;
    Var x = conv_block_forward(tape, enc.levels[4], bottleneck_.front());
    if (qmoe_) {
        x = quantum::qmoe_bottleneck(tape, x, *qmoe_, trace);
    }

    for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t l = 3 - i;
        const Var up = ops::transposed_conv2x(tape, x, up_w_[i], up_b_[i]);
        x = conv_block_forward(tape, ops::concat_channels(tape, up, skips[l]), decoder_[i]);
    }
    Var logits = ops::conv1x1(tape, x, head_w_, head_b_);
    if (trace != nullptr) {
        trace->add("logits", logits.shape());
    }
    return logits;
}

} // namespace hqf::segnet
