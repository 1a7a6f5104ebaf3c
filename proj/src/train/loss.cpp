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
#include "hqf/train/loss.hpp"

#include <cmath>

#include "hqf/tensor/error.hpp"

namespace hqf::train {

namespace {

void check_layout(const Shape &s, const LabelMap &mask) {
    if (s.size() != 4) {
        throw DimensionError("cross_entropy", "rank", 4, s.size());
    }
    if (mask.batch != s[0]) {
        throw DimensionError("cross_entropy", "batch", s[0], mask.batch);
    }
    if (mask.height != s[2]) {
        throw DimensionError("cross_entropy", "height", s[2], mask.height);
    }
    if (mask.width != s[3]) {
        throw DimensionError("cross_entropy", "width", s[3], mask.width);
    }
}

} // namespace

Var cross_entropy(Tape &tape, const Var &logits, const LabelMap &mask) {
    const Shape &s = logits.shape();
    check_layout(s, mask);
    const std::size_t nb = s[0], nc = s[1], plane = s[2] * s[3];
    const double *z = logits.value().raw();

    std::size_t counted = 0;
    for (const auto label : mask.labels) {
        if (label == kIgnoreLabel) {
            continue;
        }
        if (label >= nc) {
            throw DataError("cross_entropy: label " + std::to_string(label) +
                            " is out of range for " + std::to_string(nc) + " classes");
        }
        ++counted;
    }
    if (counted == 0) {
        throw DataError("cross_entropy: every pixel is ignored");
    }

    // Per-pixel softmax probabilities are kept for the backward pass.
    Tensor prob({nb, nc, s[2], s[3]});
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t p = 0; p < plane; ++p) {
            const double *zp = z + b * nc * plane + p;
            double *pp = prob.raw() + b * nc * plane + p;
            double m = zp[0];
            for (std::size_t c = 1; c < nc; ++c) {
                m = std::max(m, zp[c * plane]);
            }
            double sum = 0.0;
            for (std::size_t c = 0; c < nc; ++c) {
                pp[c * plane] = std::exp(zp[c * plane] - m);
                sum += pp[c * plane];
            }
            for (std::size_t c = 0; c < nc; ++c) {
                pp[c * plane] /= sum;
            }
            const auto label = mask.labels[b * plane + p];
            if (label != kIgnoreLabel) {
                total += std::log(sum) + m - zp[label * plane];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(counted);
    Var out = tape.output(Tensor({1}, total * inv), {&logits});
    if (tape.recording() && logits.requires_grad()) {
        tape.record([logits, out, prob = std::move(prob), labels = mask.labels, nb, nc, plane,
                     inv]() {
            const double g = out.grad()[0] * inv;
            double *gz = logits.grad().raw();
            for (std::size_t b = 0; b < nb; ++b) {
                for (std::size_t p = 0; p < plane; ++p) {
                    const auto label = labels[b * plane + p];
                    if (label == kIgnoreLabel) {
                        continue;
                    }
                    const std::size_t base = b * nc * plane + p;
                    for (std::size_t c = 0; c < nc; ++c) {
                        const double onehot = c == label ? 1.0 : 0.0;
                        gz[base + c * plane] += g * (prob[base + c * plane] - onehot);
                    }
                }
            }
        });
    }
    return out;
}

LabelMap argmax_labels(const Tensor &logits) {
    const Shape &s = logits.shape();
    if (s.size() != 4) {
        throw DimensionError("argmax_labels", "rank", 4, s.size());
    }
    const std::size_t nc = s[1], plane = s[2] * s[3];
    if (nc > kIgnoreLabel) {
        throw DimensionError("argmax_labels", "classes", "at most 255 classes are supported");
    }
    LabelMap out(s[0], s[2], s[3]);
    const double *z = logits.raw();
    for (std::size_t b = 0; b < s[0]; ++b) {
        for (std::size_t p = 0; p < plane; ++p) {
            const double *zp = z + b * nc * plane + p;
            std::size_t best = 0;
            for (std::size_t c = 1; c < nc; ++c) {
                if (zp[c * plane] > zp[best * plane]) {
                    best = c;
                }
            }
            out.labels[b * plane + p] = static_cast<std::uint8_t>(best);
        }
    }
    return out;
}

} // namespace hqf::train
