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
#include "hqf/dmcaf/dmcaf.hpp"

#include <cmath>
#include <numbers>

#include "hqf/tensor/bilinear.hpp"
#include "hqf/tensor/error.hpp"
#include "hqf/tensor/init.hpp"
#include "hqf/tensor/ops.hpp"
#include "hqf/tensor/parallel.hpp"

namespace hqf::dmcaf {

void DmcafConfig::validate() const {
    if (d == 0 || heads == 0 || points == 0 || stride == 0) {
        throw ValueError("DmcafConfig: d, heads, points and stride must be positive");
    }
    if (d % heads != 0) {
        throw ValueError("DmcafConfig: d = " + std::to_string(d) +
                         " is not divisible by heads = " + std::to_string(heads));
    }
}

FusionStage::FusionStage(const std::string &prefix, std::size_t channels_,
                         std::size_t value_channels_, const DmcafConfig &cfg_,
                         ParameterSet &params, Rng &rng)
    : cfg(cfg_), channels(channels_), value_channels(value_channels_) {
    cfg.validate();
    const std::size_t d = cfg.d;
    const std::size_t hk = cfg.heads * cfg.points;
    const auto p = [&](const char *name, Tensor init) {
        return params.add(prefix + "." + name, std::move(init));
    };
    query_w = p("query_w", init::fan_in_uniform({d, channels}, channels, rng));
    query_b = p("query_b", Tensor({d}));
    value_w = p("value_w", init::fan_in_uniform({d, value_channels}, value_channels, rng));
    value_b = p("value_b", Tensor({d}));

    // Small random offset weights; the bias fans each head's points out
    // along its own direction so points start distinct.
    offset_w = p("offset_w", init::uniform({hk * 2, d}, 0.01, rng));
    Tensor ob({hk * 2});
    for (std::size_t h = 0; h < cfg.heads; ++h) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(h) /
                             static_cast<double>(cfg.heads);
        for (std::size_t k = 0; k < cfg.points; ++k) {
            const double r = 0.25 * static_cast<double>(k + 1) /
                             static_cast<double>(cfg.points);
            ob[(h * cfg.points + k) * 2] = r * std::cos(theta);
            ob[(h * cfg.points + k) * 2 + 1] = r * std::sin(theta);
        }
    }
    offset_b = p("offset_b", std::move(ob));
    offset_range = p("offset_range", Tensor({1}, 1.0));
    attn_w = p("attn_w", init::fan_in_uniform({hk, d}, d, rng));
    attn_b = p("attn_b", Tensor({hk}));
    out_w = p("out_w", init::fan_in_uniform({channels, d}, d, rng));
    out_b = p("out_b", Tensor({channels}));
    film_hidden_w = p("film_hidden_w", init::fan_in_uniform({channels, channels}, channels, rng));
    film_hidden_b = p("film_hidden_b", Tensor({channels}));
    // Zero output layer: the stage starts as the identity on U.
    film_out_w = p("film_out_w", Tensor({3 * channels, channels}));
    film_out_b = p("film_out_b", Tensor({3 * channels}));
}

Var pool_and_project_queries(Tape &tape, const Var &u, const FusionStage &stage) {
    if (u.shape().size() != 4) {
        throw DimensionError("pool_and_project_queries", "rank", 4, u.shape().size());
    }
    const std::size_t s = stage.cfg.stride;
    if (u.shape()[2] % s != 0) {
        throw DimensionError("pool_and_project_queries", "H",
                             "stride " + std::to_string(s) + " does not divide " +
                                 std::to_string(u.shape()[2]));
    }
    if (u.shape()[3] % s != 0) {
        throw DimensionError("pool_and_project_queries", "W",
                             "stride " + std::to_string(s) + " does not divide " +
                                 std::to_string(u.shape()[3]));
    }
    Var pooled = s == 1 ? u : ops::avg_pool(tape, u, s);
    return ops::conv1x1(tape, pooled, stage.query_w, stage.query_b);
}

Tensor reference_points(std::size_t hq, std::size_t wq, std::size_t ht, std::size_t wt) {
    if (hq == 0 || wq == 0 || ht == 0 || wt == 0) {
        throw ValueError("reference_points: grid extents must be positive");
    }
    Tensor ref({hq, wq, 2});
    for (std::size_t y = 0; y < hq; ++y) {
        for (std::size_t x = 0; x < wq; ++x) {
            ref.at({y, x, 0}) = 2.0 * (static_cast<double>(x) + 0.5) / static_cast<double>(wq) - 1.0;
            ref.at({y, x, 1}) = 2.0 * (static_cast<double>(y) + 0.5) / static_cast<double>(hq) - 1.0;
        }
    }
    return ref;
}

OffsetsAndWeights predict_offsets_weights(Tape &tape, const Var &q,
                                          const FusionStage &stage) {
    const std::size_t b = q.shape()[0];
    const std::size_t hq = q.shape()[2];
    const std::size_t wq = q.shape()[3];
    const std::size_t heads = stage.cfg.heads;
    const std::size_t k = stage.cfg.points;

    Var raw = ops::conv1x1(tape, q, stage.offset_w, stage.offset_b);
    raw = ops::reshape(tape, raw, {b, heads, k, 2, hq, wq});
    raw = ops::permute(tape, raw, {0, 1, 2, 4, 5, 3});
    Var offsets = ops::scale(tape, ops::tanh(tape, raw), stage.offset_range);

    Var logits = ops::conv1x1(tape, q, stage.attn_w, stage.attn_b);
    logits = ops::reshape(tape, logits, {b, heads, k, hq, wq});
    logits = ops::permute(tape, logits, {0, 1, 3, 4, 2});
    return {offsets, ops::softmax(tape, logits)};
}

Var aggregate_context(Tape &tape, const Var &values, const Tensor &ref,
                      const Var &offsets, const Var &weights, std::size_t heads) {
    constexpr const char *op = "aggregate_context";
    const Shape &vs = values.shape();
    const Shape &os = offsets.shape();
    const Shape &ws = weights.shape();
    if (vs.size() != 4) {
        throw DimensionError(op, "values.rank", 4, vs.size());
    }
    if (os.size() != 6 || os[5] != 2) {
        throw DimensionError(op, "offsets", "expected [B,heads,K,Hq,Wq,2], got " + shape_str(os));
    }
    if (ws.size() != 5) {
        throw DimensionError(op, "weights.rank", 5, ws.size());
    }
    const std::size_t b = vs[0], d = vs[1], ht = vs[2], wt = vs[3];
    const std::size_t k = os[2], hq = os[3], wq = os[4];
    if (heads == 0 || d % heads != 0) {
        throw DimensionError(op, "heads", "value channels not divisible by heads");
    }
    if (os[0] != b) throw DimensionError(op, "offsets.B", b, os[0]);
    if (os[1] != heads) throw DimensionError(op, "offsets.heads", heads, os[1]);
    if (ws != Shape{b, heads, hq, wq, k}) {
        throw DimensionError(op, "weights", "expected " + shape_str({b, heads, hq, wq, k}) +
                                                ", got " + shape_str(ws));
    }
    if (ref.shape() != Shape{hq, wq, 2}) {
        throw DimensionError(op, "ref", "expected " + shape_str({hq, wq, 2}) + ", got " +
                                            shape_str(ref.shape()));
    }
    const std::size_t dh = d / heads;
    const std::size_t nq = hq * wq;
    const std::size_t vplane = ht * wt;

    // Sampling taps are shared by the dh channels of a head.
    const auto tap_at = [=, rp = ref](const double *off, std::size_t kk, std::size_t qi) {
        const double *o = off + (kk * nq + qi) * 2;
        return bilinear::Tap(bilinear::to_pixel(rp[qi * 2] + o[0], wt),
                             bilinear::to_pixel(rp[qi * 2 + 1] + o[1], ht));
    };

    Tensor out({b, d, hq, wq});
    {
        const double *vp = values.value().raw();
        const double *op_ = offsets.value().raw();
        const double *wp = weights.value().raw();
        double *outp = out.raw();
        parallel_for(b * heads, [&](std::size_t bh) {
            const std::size_t bi = bh / heads;
            const std::size_t h = bh % heads;
            const double *vhead = vp + (bi * d + h * dh) * vplane;
            const double *off = op_ + bh * k * nq * 2;
            const double *att = wp + bh * nq * k;
            double *o = outp + (bi * d + h * dh) * nq;
            for (std::size_t qi = 0; qi < nq; ++qi) {
                for (std::size_t kk = 0; kk < k; ++kk) {
                    const auto tap = tap_at(off, kk, qi);
                    const double a = att[qi * k + kk];
                    for (std::size_t c = 0; c < dh; ++c) {
                        o[c * nq + qi] += a * tap.sample(vhead + c * vplane, ht, wt);
                    }
                }
            }
        });
    }

    Var y = tape.output(std::move(out), {&values, &offsets, &weights});
    if (y.requires_grad()) {
        tape.record([values, offsets, weights, y, tap_at, b, heads, d, dh, k, nq, vplane, ht,
                     wt]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            const double *vp = values.value().raw();
            const double *op_ = offsets.value().raw();
            const double *wp = weights.value().raw();
            double *gv = values.requires_grad() ? values.grad().raw() : nullptr;
            double *go = offsets.requires_grad() ? offsets.grad().raw() : nullptr;
            double *gw = weights.requires_grad() ? weights.grad().raw() : nullptr;
            parallel_for(b * heads, [&](std::size_t bh) {
                const std::size_t bi = bh / heads;
                const std::size_t h = bh % heads;
                const double *vhead = vp + (bi * d + h * dh) * vplane;
                double *gvhead = gv ? gv + (bi * d + h * dh) * vplane : nullptr;
                const double *off = op_ + bh * k * nq * 2;
                const double *att = wp + bh * nq * k;
                const double *g = gy + (bi * d + h * dh) * nq;
                for (std::size_t qi = 0; qi < nq; ++qi) {
                    for (std::size_t kk = 0; kk < k; ++kk) {
                        const auto tap = tap_at(off, kk, qi);
                        const double a = att[qi * k + kk];
                        double dpx = 0.0, dpy = 0.0, da = 0.0;
                        for (std::size_t c = 0; c < dh; ++c) {
                            const double gc = g[c * nq + qi];
                            const double *plane = vhead + c * vplane;
                            if (gw) {
                                da += gc * tap.sample(plane, ht, wt);
                            }
                            tap.backward(plane, gvhead ? gvhead + c * vplane : nullptr, ht, wt,
                                         gc * a, dpx, dpy);
                        }
                        if (gw) {
                            gw[bh * nq * k + qi * k + kk] += da;
                        }
                        if (go) {
                            double *gofs = go + bh * k * nq * 2 + (kk * nq + qi) * 2;
                            gofs[0] += dpx * bilinear::pixel_scale(wt);
                            gofs[1] += dpy * bilinear::pixel_scale(ht);
                        }
                    }
                }
            });
        });
    }
    return y;
}

Var film_modulate(Tape &tape, const Var &u, const Var &ctx_up, const Var &gamma,
                  const Var &beta, const Var &alpha) {
    if (ctx_up.shape() != u.shape()) {
        throw DimensionError("film_inject", "ctx", shape_str(u.shape()) + " vs " +
                                                       shape_str(ctx_up.shape()));
    }
    Var f = ops::add(tape, u, ops::scale_channels(tape, u, gamma));
    f = ops::shift_channels(tape, f, beta);
    return ops::add(tape, f, ops::scale_channels(tape, ctx_up, alpha));
}

Var film_inject(Tape &tape, const Var &u, const Var &ctx, const FusionStage &stage) {
    if (u.shape().size() != 4 || u.shape()[1] != stage.channels) {
        throw DimensionError("film_inject", "C", stage.channels,
                             u.shape().size() == 4 ? u.shape()[1] : 0);
    }
    const std::size_t c = stage.channels;
    Var back = ops::conv1x1(tape, ctx, stage.out_w, stage.out_b);
    Var up = ops::bilinear_upsample(tape, back, u.shape()[2], u.shape()[3]);
    Var pooled = ops::global_avg_pool(tape, up);
    Var hidden = ops::relu(tape, ops::linear(tape, pooled, stage.film_hidden_w, stage.film_hidden_b));
    Var mod = ops::linear(tape, hidden, stage.film_out_w, stage.film_out_b);
    return film_modulate(tape, u, up, ops::slice_cols(tape, mod, 0, c),
                         ops::slice_cols(tape, mod, c, 2 * c),
                         ops::slice_cols(tape, mod, 2 * c, 3 * c));
}

Var fusion_forward(Tape &tape, const Var &u, const Var &d, const FusionStage &stage) {
    if (d.shape().size() != 4 || d.shape()[1] != stage.value_channels) {
        throw DimensionError("fusion_forward", "Ct", stage.value_channels,
                             d.shape().size() == 4 ? d.shape()[1] : 0);
    }
    if (d.shape()[0] != u.shape()[0]) {
        throw DimensionError("fusion_forward", "B", u.shape()[0], d.shape()[0]);
    }
    Var q = pool_and_project_queries(tape, u, stage);
    Var v = ops::conv1x1(tape, d, stage.value_w, stage.value_b);
    auto [offsets, weights] = predict_offsets_weights(tape, q, stage);
    const Tensor ref = reference_points(q.shape()[2], q.shape()[3], d.shape()[2], d.shape()[3]);
    Var ctx = aggregate_context(tape, v, ref, offsets, weights, stage.cfg.heads);
    return film_inject(tape, u, ctx, stage);
}

} // namespace hqf::dmcaf
