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
 * Deformable multiscale cross-attention fusion.
 *
 * Encoder features U act as queries after stride pooling; frozen semantic
 * features D provide values. Each query samples K points per head around
 * its reference location, mixes them with softmax weights, and the result
 * modulates U through a FiLM-style residual:
 *
 *     F = (1 + gamma) * U + beta + alpha * ctx_up
 *
 * where (gamma, beta, alpha) come from a small MLP on the pooled context.
 */
#pragma once

#include <cstddef>
#include <string>

#include "hqf/tensor/autodiff.hpp"
#include "hqf/tensor/random.hpp"

namespace hqf::dmcaf {

struct DmcafConfig {
    std::size_t d = 64;       ///< shared attention width
    std::size_t heads = 4;
    std::size_t points = 4;   ///< sampling points per query per head
    std::size_t stride = 2;   ///< query pooling stride

    /// Throws ValueError on d % heads != 0 or zero counts.
    void validate() const;
    [[nodiscard]] std::size_t head_dim() const noexcept { return d / heads; }
};

/// Weights of one fused encoder stage, registered in a ParameterSet.
struct FusionStage {
    DmcafConfig cfg;
    std::size_t channels = 0;        ///< C of the encoder feature
    std::size_t value_channels = 0;  ///< C of the semantic feature

    Var query_w, query_b;    // [d, C], [d]
    Var value_w, value_b;    // [d, Ct], [d]
    Var offset_w, offset_b;  // [heads*K*2, d], [heads*K*2]
    Var offset_range;        // [1], normalized units
    Var attn_w, attn_b;      // [heads*K, d], [heads*K]
    Var out_w, out_b;        // [C, d], [C]
    Var film_hidden_w, film_hidden_b;  // [C, C], [C]
    Var film_out_w, film_out_b;        // [3C, C], [3C]; zero at init

    FusionStage(const std::string &prefix, std::size_t channels,
                std::size_t value_channels, const DmcafConfig &cfg, ParameterSet &params,
                Rng &rng);
};

/// Stride pooling then 1x1 projection to d channels. Throws DimensionError
/// when the stride does not divide H and W.
Var pool_and_project_queries(Tape &tape, const Var &u, const FusionStage &stage);

/// Query cell centres in normalized value-grid coordinates, [Hq, Wq, 2]
/// with x first. The value grid extent does not enter: normalized
/// coordinates span the full grid at any resolution.
[[nodiscard]] Tensor reference_points(std::size_t hq, std::size_t wq, std::size_t ht,
                                      std::size_t wt);

struct OffsetsAndWeights {
    Var offsets;  ///< [B, heads, K, Hq, Wq, 2], bounded by offset_range
    Var weights;  ///< [B, heads, Hq, Wq, K], softmax over K
};

OffsetsAndWeights predict_offsets_weights(Tape &tape, const Var &q,
                                          const FusionStage &stage);

/**
 * ctx[b, h*dh + c, y, x] = sum_k A[b,h,y,x,k] * V[b, h*dh + c](p_ref + dp[b,h,k,y,x])
 * with bilinear sampling, zero padding. Cost is linear in K.
 */
Var aggregate_context(Tape &tape, const Var &values, const Tensor &ref,
                      const Var &offsets, const Var &weights, std::size_t heads);

/// F = U + U*gamma + beta + ctx_up*alpha with per-channel [B, C] modulators.
Var film_modulate(Tape &tape, const Var &u, const Var &ctx_up, const Var &gamma,
                  const Var &beta, const Var &alpha);

/// Back-projects ctx to C channels, upsamples to U's size, derives
/// (gamma, beta, alpha) from its global average, then modulates U.
Var film_inject(Tape &tape, const Var &u, const Var &ctx, const FusionStage &stage);

/// Full stage: U [B,C,H,W], D [B,Ct,Ht,Wt] -> F [B,C,H,W].
Var fusion_forward(Tape &tape, const Var &u, const Var &d, const FusionStage &stage);

} // namespace hqf::dmcaf
