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
 * Differentiable layer primitives. Every op computes its forward value
 * eagerly and, when the tape records and an input requires grad, appends
 * its analytic backward to the tape.
 *
 * Image tensors are NCHW. Sampling coordinates are normalized to [-1, 1]
 * with -1/+1 on the outer edges of the border pixels (pixel centres at
 * (2i + 1) / n - 1), x first.
 */
#pragma once

#include <cstddef>
#include <vector>

#include "hqf/tensor/autodiff.hpp"

namespace hqf::ops {

/// out[b,co,h,w] = bias[co] + sum_ci w[co,ci] * x[b,ci,h,w].
Var conv1x1(Tape &tape, const Var &x, const Var &w, const Var &bias);

/// Per-channel 3x3 convolution, zero padding 1, stride 1 or 2.
/// Output spatial size is floor(H / stride) x floor(W / stride).
Var depthwise_conv3x3(Tape &tape, const Var &x, const Var &kernel,
                      std::size_t stride);

/// depthwise_conv3x3 followed by conv1x1(pointwise, bias).
Var depthwise_separable_conv(Tape &tape, const Var &x, const Var &depthwise,
                             const Var &pointwise, const Var &bias,
                             std::size_t stride);

/// 2x2 stride-2 transposed convolution; w is [Cin, Cout, 2, 2].
Var transposed_conv2x(Tape &tape, const Var &x, const Var &w, const Var &bias);

/// Output cell j averages rows floor(j*H/S) .. ceil((j+1)*H/S)-1.
Var adaptive_avg_pool(Tape &tape, const Var &x, std::size_t out_h,
                      std::size_t out_w);
inline Var adaptive_avg_pool(Tape &tape, const Var &x, std::size_t size) {
    return adaptive_avg_pool(tape, x, size, size);
}

/// Non-overlapping stride x stride average pooling; stride must divide H, W.
Var avg_pool(Tape &tape, const Var &x, std::size_t stride);

/// Samples v[B,C,Ht,Wt] at coords[B,P,2] -> [B,C,P]. Zero padding.
Var bilinear_sample(Tape &tape, const Var &v, const Var &coords);

/// Bilinear resize to [B,C,H,W] with half-pixel centres and edge clamping.
Var bilinear_upsample(Tape &tape, const Var &x, std::size_t out_h,
                      std::size_t out_w);

Var tanh(Tape &tape, const Var &x);
Var sigmoid(Tape &tape, const Var &x);
Var relu(Tape &tape, const Var &x);
/// Softmax over the last axis.
Var softmax(Tape &tape, const Var &x);

/// y[n,o] = c[o] + sum_i w[o,i] * x[n,i].
Var linear(Tape &tape, const Var &x, const Var &w, const Var &c);

/// [B,C,H,W] -> [B,C].
Var global_avg_pool(Tape &tape, const Var &x);

Var add(Tape &tape, const Var &a, const Var &b);
Var mul(Tape &tape, const Var &a, const Var &b);
/// x times a single-element variable.
Var scale(Tape &tape, const Var &x, const Var &s);
/// x[b,c,h,w] * s[b,c].
Var scale_channels(Tape &tape, const Var &x, const Var &s);
/// x[b,c,h,w] + s[b,c].
Var shift_channels(Tape &tape, const Var &x, const Var &s);
/// [B,C] -> [B,C,H,W], constant over space.
Var broadcast_spatial(Tape &tape, const Var &x, std::size_t h, std::size_t w);
Var concat_channels(Tape &tape, const Var &a, const Var &b);

Var reshape(Tape &tape, const Var &x, Shape shape);
/// out axis i is input axis perm[i].
Var permute(Tape &tape, const Var &x, const std::vector<std::size_t> &perm);
/// Columns [begin, end) of a rank-2 tensor.
Var slice_cols(Tape &tape, const Var &x, std::size_t begin, std::size_t end);

/// out[b,n] = sum_k g[b,k] * experts[k][b,n].
Var mixture(Tape &tape, const Var &g, const std::vector<Var> &experts);

/// Scalar sum_i w[i] * x[i] with a constant weight tensor.
Var weighted_sum(Tape &tape, const Var &x, const Tensor &w);
/// Scalar mean of all elements.
Var mean(Tape &tape, const Var &x);

} // namespace hqf::ops
