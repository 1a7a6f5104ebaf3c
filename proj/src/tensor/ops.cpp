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
#include "hqf/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hqf/tensor/bilinear.hpp"
#include "hqf/tensor/error.hpp"
#include "hqf/tensor/parallel.hpp"

namespace hqf::ops {

namespace {

void require_rank(const char *op, const Var &x, std::size_t rank) {
    if (x.value().rank() != rank) {
        throw DimensionError(op, "rank", rank, x.value().rank());
    }
}

void require_dim(const char *op, const char *axis, std::size_t expected,
                 std::size_t actual) {
    if (expected != actual) {
        throw DimensionError(op, axis, expected, actual);
    }
}

void require_same_shape(const char *op, const Var &a, const Var &b) {
    if (a.shape() != b.shape()) {
        throw DimensionError(op, "shape",
                             shape_str(a.shape()) + " vs " +
                                 shape_str(b.shape()));
    }
}

struct Nchw {
    std::size_t b, c, h, w;
    explicit Nchw(const Tensor &t)
        : b(t.dim(0)), c(t.dim(1)), h(t.dim(2)), w(t.dim(3)) {}
    [[nodiscard]] std::size_t plane() const { return h * w; }
};

/// Elementwise unary op with derivative expressed through (x, y).
template <typename F, typename D>
Var unary(Tape &tape, const Var &x, F f, D dfdx) {
    const Tensor &xv = x.value();
    Tensor out(xv.shape());
    for (std::size_t i = 0; i < xv.numel(); ++i) {
        out[i] = f(xv[i]);
    }
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, dfdx]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const Tensor &gy = y.grad();
            const Tensor &xv = x.value();
            const Tensor &yv = y.value();
            Tensor &gx = x.grad();
            for (std::size_t i = 0; i < gx.numel(); ++i) {
                gx[i] += gy[i] * dfdx(xv[i], yv[i]);
            }
        });
    }
    return y;
}

} // namespace

Var conv1x1(Tape &tape, const Var &x, const Var &w, const Var &bias) {
    constexpr const char *op = "conv1x1";
    require_rank(op, x, 4);
    require_rank(op, w, 2);
    require_rank(op, bias, 1);
    const Nchw s(x.value());
    const std::size_t cout = w.value().dim(0);
    require_dim(op, "Cin", w.value().dim(1), s.c);
    require_dim(op, "Cout(bias)", cout, bias.value().dim(0));
    const std::size_t hw = s.plane();

    Tensor out({s.b, cout, s.h, s.w});
    {
        const double *xp = x.value().raw();
        const double *wp = w.value().raw();
        const double *bp = bias.value().raw();
        double *op_ = out.raw();
        parallel_for(s.b * cout, [&](std::size_t item) {
            const std::size_t b = item / cout;
            const std::size_t co = item % cout;
            double *o = op_ + item * hw;
            std::fill(o, o + hw, bp[co]);
            for (std::size_t ci = 0; ci < s.c; ++ci) {
                const double wv = wp[co * s.c + ci];
                const double *xi = xp + (b * s.c + ci) * hw;
                for (std::size_t p = 0; p < hw; ++p) {
                    o[p] += wv * xi[p];
                }
            }
        });
    }
    Var y = tape.output(std::move(out), {&x, &w, &bias});
    if (y.requires_grad()) {
        tape.record([x, w, bias, y, s, cout, hw]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            if (x.requires_grad()) {
                double *gx = x.grad().raw();
                const double *wp = w.value().raw();
                parallel_for(s.b * s.c, [&](std::size_t item) {
                    const std::size_t b = item / s.c;
                    const std::size_t ci = item % s.c;
                    double *g = gx + item * hw;
                    for (std::size_t co = 0; co < cout; ++co) {
                        const double wv = wp[co * s.c + ci];
                        const double *go = gy + (b * cout + co) * hw;
                        for (std::size_t p = 0; p < hw; ++p) {
                            g[p] += wv * go[p];
                        }
                    }
                });
            }
            if (w.requires_grad()) {
                double *gw = w.grad().raw();
                const double *xp = x.value().raw();
                parallel_for(cout, [&](std::size_t co) {
                    for (std::size_t ci = 0; ci < s.c; ++ci) {
                        double acc = 0.0;
                        for (std::size_t b = 0; b < s.b; ++b) {
                            const double *go = gy + (b * cout + co) * hw;
                            const double *xi = xp + (b * s.c + ci) * hw;
                            for (std::size_t p = 0; p < hw; ++p) {
                                acc += go[p] * xi[p];
                            }
                        }
                        gw[co * s.c + ci] += acc;
                    }
                });
            }
            if (bias.requires_grad()) {
                double *gb = bias.grad().raw();
                for (std::size_t co = 0; co < cout; ++co) {
                    double acc = 0.0;
                    for (std::size_t b = 0; b < s.b; ++b) {
                        const double *go = gy + (b * cout + co) * hw;
                        for (std::size_t p = 0; p < hw; ++p) {
                            acc += go[p];
                        }
                    }
                    gb[co] += acc;
                }
            }
        });
    }
    return y;
}

Var depthwise_conv3x3(Tape &tape, const Var &x, const Var &kernel,
                      std::size_t stride) {
    constexpr const char *op = "depthwise_conv3x3";
    require_rank(op, x, 4);
    require_rank(op, kernel, 3);
    const Nchw s(x.value());
    require_dim(op, "C", kernel.value().dim(0), s.c);
    require_dim(op, "kh", 3, kernel.value().dim(1));
    require_dim(op, "kw", 3, kernel.value().dim(2));
    if (stride != 1 && stride != 2) {
        throw ValueError(std::string(op) + ": stride must be 1 or 2");
    }
    const std::size_t ho = s.h / stride;
    const std::size_t wo = s.w / stride;
    if (ho < 1) {
        throw DimensionError(op, "H", "output height < 1 after stride");
    }
    if (wo < 1) {
        throw DimensionError(op, "W", "output width < 1 after stride");
    }
    const auto in_h = static_cast<long>(s.h);
    const auto in_w = static_cast<long>(s.w);

    Tensor out({s.b, s.c, ho, wo});
    {
        const double *xp = x.value().raw();
        const double *kp = kernel.value().raw();
        double *outp = out.raw();
        parallel_for(s.b * s.c, [&](std::size_t item) {
            const std::size_t c = item % s.c;
            const double *xi = xp + item * s.plane();
            const double *k = kp + c * 9;
            double *o = outp + item * ho * wo;
            for (std::size_t oy = 0; oy < ho; ++oy) {
                for (std::size_t ox = 0; ox < wo; ++ox) {
                    double acc = 0.0;
                    for (long ky = 0; ky < 3; ++ky) {
                        const long iy = static_cast<long>(oy * stride) + ky - 1;
                        if (iy < 0 || iy >= in_h) {
                            continue;
                        }
                        for (long kx = 0; kx < 3; ++kx) {
                            const long ix = static_cast<long>(ox * stride) + kx - 1;
                            if (ix < 0 || ix >= in_w) {
                                continue;
                            }
                            acc += k[ky * 3 + kx] *
                                   xi[static_cast<std::size_t>(iy) * s.w +
                                      static_cast<std::size_t>(ix)];
                        }
                    }
                    o[oy * wo + ox] = acc;
                }
            }
        });
    }
    Var y = tape.output(std::move(out), {&x, &kernel});
    if (y.requires_grad()) {
        tape.record([x, kernel, y, s, stride, ho, wo, in_h, in_w]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            const double *xp = x.value().raw();
            const double *kp = kernel.value().raw();
            double *gx = x.requires_grad() ? x.grad().raw() : nullptr;
            double *gk = kernel.requires_grad() ? kernel.grad().raw() : nullptr;
            // Channel-major so each worker owns its kernel gradient rows.
            parallel_for(s.c, [&](std::size_t c) {
                const double *k = kp + c * 9;
                double kacc[9] = {};
                for (std::size_t b = 0; b < s.b; ++b) {
                    const std::size_t item = b * s.c + c;
                    const double *xi = xp + item * s.plane();
                    const double *go = gy + item * ho * wo;
                    double *gxi = gx ? gx + item * s.plane() : nullptr;
                    for (std::size_t oy = 0; oy < ho; ++oy) {
                        for (std::size_t ox = 0; ox < wo; ++ox) {
                            const double g = go[oy * wo + ox];
                            for (long ky = 0; ky < 3; ++ky) {
                                const long iy =
                                    static_cast<long>(oy * stride) + ky - 1;
                                if (iy < 0 || iy >= in_h) {
                                    continue;
                                }
                                for (long kx = 0; kx < 3; ++kx) {
                                    const long ix =
                                        static_cast<long>(ox * stride) + kx - 1;
                                    if (ix < 0 || ix >= in_w) {
                                        continue;
                                    }
                                    const std::size_t pi =
                                        static_cast<std::size_t>(iy) * s.w +
                                        static_cast<std::size_t>(ix);
                                    kacc[ky * 3 + kx] += g * xi[pi];
                                    if (gxi) {
                                        gxi[pi] += g * k[ky * 3 + kx];
                                    }
                                }
                            }
                        }
                    }
                }
                if (gk) {
                    for (int i = 0; i < 9; ++i) {
                        gk[c * 9 + i] += kacc[i];
                    }
                }
            });
        });
    }
    return y;
}

Var depthwise_separable_conv(Tape &tape, const Var &x, const Var &depthwise,
                             const Var &pointwise, const Var &bias,
                             std::size_t stride) {
    return conv1x1(tape, depthwise_conv3x3(tape, x, depthwise, stride),
                   pointwise, bias);
}

Var transposed_conv2x(Tape &tape, const Var &x, const Var &w, const Var &bias) {
    constexpr const char *op = "transposed_conv2x";
    require_rank(op, x, 4);
    require_rank(op, w, 4);
    require_rank(op, bias, 1);
    const Nchw s(x.value());
    require_dim(op, "Cin", w.value().dim(0), s.c);
    const std::size_t cout = w.value().dim(1);
    require_dim(op, "kh", 2, w.value().dim(2));
    require_dim(op, "kw", 2, w.value().dim(3));
    require_dim(op, "Cout(bias)", cout, bias.value().dim(0));
    const std::size_t oh = 2 * s.h;
    const std::size_t ow = 2 * s.w;

    Tensor out({s.b, cout, oh, ow});
    {
        const double *xp = x.value().raw();
        const double *wp = w.value().raw();
        const double *bp = bias.value().raw();
        double *outp = out.raw();
        parallel_for(s.b * cout, [&](std::size_t item) {
            const std::size_t b = item / cout;
            const std::size_t co = item % cout;
            double *o = outp + item * oh * ow;
            std::fill(o, o + oh * ow, bp[co]);
            for (std::size_t ci = 0; ci < s.c; ++ci) {
                const double *xi = xp + (b * s.c + ci) * s.plane();
                const double *k = wp + (ci * cout + co) * 4;
                for (std::size_t y = 0; y < s.h; ++y) {
                    double *r0 = o + (2 * y) * ow;
                    double *r1 = r0 + ow;
                    for (std::size_t xx = 0; xx < s.w; ++xx) {
                        const double v = xi[y * s.w + xx];
                        r0[2 * xx] += v * k[0];
                        r0[2 * xx + 1] += v * k[1];
                        r1[2 * xx] += v * k[2];
                        r1[2 * xx + 1] += v * k[3];
                    }
                }
            }
        });
    }
    Var y = tape.output(std::move(out), {&x, &w, &bias});
    if (y.requires_grad()) {
        tape.record([x, w, bias, y, s, cout, oh, ow]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            const double *xp = x.value().raw();
            const double *wp = w.value().raw();
            if (x.requires_grad()) {
                double *gx = x.grad().raw();
                parallel_for(s.b * s.c, [&](std::size_t item) {
                    const std::size_t b = item / s.c;
                    const std::size_t ci = item % s.c;
                    double *g = gx + item * s.plane();
                    for (std::size_t co = 0; co < cout; ++co) {
                        const double *go = gy + (b * cout + co) * oh * ow;
                        const double *k = wp + (ci * cout + co) * 4;
                        for (std::size_t yy = 0; yy < s.h; ++yy) {
                            const double *r0 = go + (2 * yy) * ow;
                            const double *r1 = r0 + ow;
                            for (std::size_t xx = 0; xx < s.w; ++xx) {
                                g[yy * s.w + xx] += r0[2 * xx] * k[0] +
                                                    r0[2 * xx + 1] * k[1] +
                                                    r1[2 * xx] * k[2] +
                                                    r1[2 * xx + 1] * k[3];
                            }
                        }
                    }
                });
            }
            if (w.requires_grad()) {
                double *gw = w.grad().raw();
                parallel_for(s.c, [&](std::size_t ci) {
                    for (std::size_t co = 0; co < cout; ++co) {
                        double acc[4] = {};
                        for (std::size_t b = 0; b < s.b; ++b) {
                            const double *xi = xp + (b * s.c + ci) * s.plane();
                            const double *go = gy + (b * cout + co) * oh * ow;
                            for (std::size_t yy = 0; yy < s.h; ++yy) {
                                const double *r0 = go + (2 * yy) * ow;
                                const double *r1 = r0 + ow;
                                for (std::size_t xx = 0; xx < s.w; ++xx) {
                                    const double v = xi[yy * s.w + xx];
                                    acc[0] += v * r0[2 * xx];
                                    acc[1] += v * r0[2 * xx + 1];
                                    acc[2] += v * r1[2 * xx];
                                    acc[3] += v * r1[2 * xx + 1];
                                }
                            }
                        }
                        for (int i = 0; i < 4; ++i) {
                            gw[(ci * cout + co) * 4 + i] += acc[i];
                        }
                    }
                });
            }
            if (bias.requires_grad()) {
                double *gb = bias.grad().raw();
                for (std::size_t co = 0; co < cout; ++co) {
                    double acc = 0.0;
                    for (std::size_t b = 0; b < s.b; ++b) {
                        const double *go = gy + (b * cout + co) * oh * ow;
                        for (std::size_t p = 0; p < oh * ow; ++p) {
                            acc += go[p];
                        }
                    }
                    gb[co] += acc;
                }
            }
        });
    }
    return y;
}

namespace {
struct Window {
    std::size_t lo;
    std::size_t hi; // exclusive
};

std::vector<Window> adaptive_windows(std::size_t in, std::size_t out) {
    std::vector<Window> ws(out);
    for (std::size_t j = 0; j < out; ++j) {
        ws[j].lo = (j * in) / out;
        ws[j].hi = ((j + 1) * in + out - 1) / out;
    }
    return ws;
}
} // namespace

Var adaptive_avg_pool(Tape &tape, const Var &x, std::size_t out_h,
                      std::size_t out_w) {
    constexpr const char *op = "adaptive_avg_pool";
    require_rank(op, x, 4);
    const Nchw s(x.value());
    if (out_h < 1 || out_h > s.h) {
        throw DimensionError(op, "H",
                             "output size " + std::to_string(out_h) +
                                 " must lie in [1, " + std::to_string(s.h) + "]");
    }
    if (out_w < 1 || out_w > s.w) {
        throw DimensionError(op, "W",
                             "output size " + std::to_string(out_w) +
                                 " must lie in [1, " + std::to_string(s.w) + "]");
    }
    const auto rows = adaptive_windows(s.h, out_h);
    const auto cols = adaptive_windows(s.w, out_w);

    Tensor out({s.b, s.c, out_h, out_w});
    const double *xp = x.value().raw();
    for (std::size_t item = 0; item < s.b * s.c; ++item) {
        const double *xi = xp + item * s.plane();
        for (std::size_t i = 0; i < out_h; ++i) {
            for (std::size_t j = 0; j < out_w; ++j) {
                double acc = 0.0;
                for (std::size_t y = rows[i].lo; y < rows[i].hi; ++y) {
                    for (std::size_t xx = cols[j].lo; xx < cols[j].hi; ++xx) {
                        acc += xi[y * s.w + xx];
                    }
                }
                const auto count = static_cast<double>(
                    (rows[i].hi - rows[i].lo) * (cols[j].hi - cols[j].lo));
                out[(item * out_h + i) * out_w + j] = acc / count;
            }
        }
    }
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, s, rows, cols, out_h, out_w]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            double *gx = x.grad().raw();
            for (std::size_t item = 0; item < s.b * s.c; ++item) {
                double *g = gx + item * s.plane();
                for (std::size_t i = 0; i < out_h; ++i) {
                    for (std::size_t j = 0; j < out_w; ++j) {
                        const auto count = static_cast<double>(
                            (rows[i].hi - rows[i].lo) * (cols[j].hi - cols[j].lo));
                        const double v = gy[(item * out_h + i) * out_w + j] / count;
                        for (std::size_t yy = rows[i].lo; yy < rows[i].hi; ++yy) {
                            for (std::size_t xx = cols[j].lo; xx < cols[j].hi; ++xx) {
                                g[yy * s.w + xx] += v;
                            }
                        }
                    }
                }
            }
        });
    }
    return y;
}

Var avg_pool(Tape &tape, const Var &x, std::size_t stride) {
    constexpr const char *op = "avg_pool";
    require_rank(op, x, 4);
    if (stride < 1) {
        throw ValueError("avg_pool: stride must be >= 1");
    }
    const Nchw s(x.value());
    if (s.h % stride != 0) {
        throw DimensionError(op, "H",
                             "stride " + std::to_string(stride) +
                                 " does not divide " + std::to_string(s.h));
    }
    if (s.w % stride != 0) {
        throw DimensionError(op, "W",
                             "stride " + std::to_string(stride) +
                                 " does not divide " + std::to_string(s.w));
    }
    // With an exact divisor the adaptive windows are the stride blocks.
    return adaptive_avg_pool(tape, x, s.h / stride, s.w / stride);
}

Var bilinear_sample(Tape &tape, const Var &v, const Var &coords) {
    constexpr const char *op = "bilinear_sample";
    require_rank(op, v, 4);
    require_rank(op, coords, 3);
    const Nchw s(v.value());
    require_dim(op, "B", s.b, coords.value().dim(0));
    require_dim(op, "xy", 2, coords.value().dim(2));
    if (!coords.value().all_finite()) {
        throw NumericError("bilinear_sample: non-finite sampling coordinate");
    }
    const std::size_t np = coords.value().dim(1);

    Tensor out({s.b, s.c, np});
    const double *vp = v.value().raw();
    const double *cp = coords.value().raw();
    for (std::size_t b = 0; b < s.b; ++b) {
        for (std::size_t p = 0; p < np; ++p) {
            const double *uv = cp + (b * np + p) * 2;
            const bilinear::Tap tap(bilinear::to_pixel(uv[0], s.w),
                                    bilinear::to_pixel(uv[1], s.h));
            for (std::size_t c = 0; c < s.c; ++c) {
                out[(b * s.c + c) * np + p] =
                    tap.sample(vp + (b * s.c + c) * s.plane(), s.h, s.w);
            }
        }
    }
    Var y = tape.output(std::move(out), {&v, &coords});
    if (y.requires_grad()) {
        tape.record([v, coords, y, s, np]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            const double *vp = v.value().raw();
            const double *cp = coords.value().raw();
            double *gv = v.requires_grad() ? v.grad().raw() : nullptr;
            double *gc = coords.requires_grad() ? coords.grad().raw() : nullptr;
            for (std::size_t b = 0; b < s.b; ++b) {
                for (std::size_t p = 0; p < np; ++p) {
                    const double *uv = cp + (b * np + p) * 2;
                    const bilinear::Tap tap(bilinear::to_pixel(uv[0], s.w),
                                            bilinear::to_pixel(uv[1], s.h));
                    double dpx = 0.0;
                    double dpy = 0.0;
                    for (std::size_t c = 0; c < s.c; ++c) {
                        const std::size_t plane = (b * s.c + c) * s.plane();
                        tap.backward(vp + plane, gv ? gv + plane : nullptr, s.h,
                                     s.w, gy[(b * s.c + c) * np + p], dpx, dpy);
                    }
                    if (gc) {
                        gc[(b * np + p) * 2] += dpx * bilinear::pixel_scale(s.w);
                        gc[(b * np + p) * 2 + 1] += dpy * bilinear::pixel_scale(s.h);
                    }
                }
            }
        });
    }
    return y;
}

namespace {
struct ResizeTap {
    std::size_t i0;
    std::size_t i1;
    double f;
};

std::vector<ResizeTap> resize_taps(std::size_t in, std::size_t out) {
    std::vector<ResizeTap> taps(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t j = 0; j < out; ++j) {
        double src = (static_cast<double>(j) + 0.5) * scale - 0.5;
        src = std::max(src, 0.0);
        auto i0 = static_cast<std::size_t>(std::floor(src));
        i0 = std::min(i0, in - 1);
        const std::size_t i1 = std::min(i0 + 1, in - 1);
        taps[j] = {i0, i1, src - static_cast<double>(i0)};
    }
    return taps;
}
} // namespace

Var bilinear_upsample(Tape &tape, const Var &x, std::size_t out_h,
                      std::size_t out_w) {
    constexpr const char *op = "bilinear_upsample";
    require_rank(op, x, 4);
    const Nchw s(x.value());
    if (out_h < s.h) {
        throw DimensionError(op, "H", "target height smaller than input");
    }
    if (out_w < s.w) {
        throw DimensionError(op, "W", "target width smaller than input");
    }
    const auto ty = resize_taps(s.h, out_h);
    const auto tx = resize_taps(s.w, out_w);

    Tensor out({s.b, s.c, out_h, out_w});
    const double *xp = x.value().raw();
    for (std::size_t item = 0; item < s.b * s.c; ++item) {
        const double *xi = xp + item * s.plane();
        double *o = out.raw() + item * out_h * out_w;
        for (std::size_t i = 0; i < out_h; ++i) {
            const auto &ry = ty[i];
            for (std::size_t j = 0; j < out_w; ++j) {
                const auto &rx = tx[j];
                const double top = (1 - rx.f) * xi[ry.i0 * s.w + rx.i0] +
                                   rx.f * xi[ry.i0 * s.w + rx.i1];
                const double bot = (1 - rx.f) * xi[ry.i1 * s.w + rx.i0] +
                                   rx.f * xi[ry.i1 * s.w + rx.i1];
                o[i * out_w + j] = (1 - ry.f) * top + ry.f * bot;
            }
        }
    }
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, s, ty, tx, out_h, out_w]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            double *gx = x.grad().raw();
            for (std::size_t item = 0; item < s.b * s.c; ++item) {
                double *g = gx + item * s.plane();
                const double *go = gy + item * out_h * out_w;
                for (std::size_t i = 0; i < out_h; ++i) {
                    const auto &ry = ty[i];
                    for (std::size_t j = 0; j < out_w; ++j) {
                        const auto &rx = tx[j];
                        const double v = go[i * out_w + j];
                        g[ry.i0 * s.w + rx.i0] += v * (1 - ry.f) * (1 - rx.f);
                        g[ry.i0 * s.w + rx.i1] += v * (1 - ry.f) * rx.f;
                        g[ry.i1 * s.w + rx.i0] += v * ry.f * (1 - rx.f);
                        g[ry.i1 * s.w + rx.i1] += v * ry.f * rx.f;
                    }
                }
            }
        });
    }
    return y;
}

Var tanh(Tape &tape, const Var &x) {
    return unary(
        tape, x, [](double v) { return std::tanh(v); },
        [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Tape &tape, const Var &x) {
    return unary(
        tape, x,
        [](double v) {
            // Split by sign so exp never overflows.
            if (v >= 0) {
                return 1.0 / (1.0 + std::exp(-v));
            }
            const double e = std::exp(v);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Var relu(Tape &tape, const Var &x) {
    return unary(
        tape, x, [](double v) { return v > 0 ? v : 0.0; },
        [](double v, double) { return v > 0 ? 1.0 : 0.0; });
}

Var softmax(Tape &tape, const Var &x) {
    const Tensor &xv = x.value();
    if (xv.rank() == 0 || xv.numel() == 0) {
        throw DimensionError("softmax", "last", "empty axis");
    }
    const std::size_t n = xv.shape().back();
    const std::size_t rows = xv.numel() / n;
    Tensor out(xv.shape());
    for (std::size_t r = 0; r < rows; ++r) {
        const double *in = xv.raw() + r * n;
        double *o = out.raw() + r * n;
        const double mx = *std::max_element(in, in + n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            o[i] = std::exp(in[i] - mx);
            sum += o[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            o[i] /= sum;
        }
    }
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, n, rows]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            const double *yv = y.value().raw();
            double *gx = x.grad().raw();
            for (std::size_t r = 0; r < rows; ++r) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dot += gy[r * n + i] * yv[r * n + i];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    gx[r * n + i] += yv[r * n + i] * (gy[r * n + i] - dot);
                }
            }
        });
    }
    return y;
}

Var linear(Tape &tape, const Var &x, const Var &w, const Var &c) {
    constexpr const char *op = "linear";
    require_rank(op, x, 2);
    require_rank(op, w, 2);
    require_rank(op, c, 1);
    const std::size_t n = x.value().dim(0);
    const std::size_t in = x.value().dim(1);
    const std::size_t outd = w.value().dim(0);
    require_dim(op, "in", w.value().dim(1), in);
    require_dim(op, "out(bias)", outd, c.value().dim(0));

    Tensor out({n, outd});
    const double *xp = x.value().raw();
    const double *wp = w.value().raw();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t o = 0; o < outd; ++o) {
            double acc = c.value()[o];
            for (std::size_t i = 0; i < in; ++i) {
                acc += wp[o * in + i] * xp[r * in + i];
            }
            out[r * outd + o] = acc;
        }
    }
    Var y = tape.output(std::move(out), {&x, &w, &c});
    if (y.requires_grad()) {
        tape.record([x, w, c, y, n, in, outd]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const double *gy = y.grad().raw();
            const double *xp = x.value().raw();
            const double *wp = w.value().raw();
            if (x.requires_grad()) {
                double *gx = x.grad().raw();
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t o = 0; o < outd; ++o) {
                        const double g = gy[r * outd + o];
                        for (std::size_t i = 0; i < in; ++i) {
                            gx[r * in + i] += g * wp[o * in + i];
                        }
                    }
                }
            }
            if (w.requires_grad()) {
                double *gw = w.grad().raw();
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t o = 0; o < outd; ++o) {
                        const double g = gy[r * outd + o];
                        for (std::size_t i = 0; i < in; ++i) {
                            gw[o * in + i] += g * xp[r * in + i];
                        }
                    }
                }
            }
            if (c.requires_grad()) {
                double *gc = c.grad().raw();
                for (std::size_t r = 0; r < n; ++r) {
                    for (std::size_t o = 0; o < outd; ++o) {
                        gc[o] += gy[r * outd + o];
                    }
                }
            }
        });
    }
    return y;
}

Var global_avg_pool(Tape &tape, const Var &x) {
    require_rank("global_avg_pool", x, 4);
    const Nchw s(x.value());
    const std::size_t hw = s.plane();
    Tensor out({s.b, s.c});
    for (std::size_t item = 0; item < s.b * s.c; ++item) {
        const double *xi = x.value().raw() + item * hw;
        out[item] = std::accumulate(xi, xi + hw, 0.0) / static_cast<double>(hw);
    }
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, s, hw]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            double *gx = x.grad().raw();
            for (std::size_t item = 0; item < s.b * s.c; ++item) {
                const double g = y.grad()[item] / static_cast<double>(hw);
                for (std::size_t p = 0; p < hw; ++p) {
                    gx[item * hw + p] += g;
                }
            }
        });
    }
    return y;
}

Var add(Tape &tape, const Var &a, const Var &b) {
    require_same_shape("add", a, b);
    Tensor out(a.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) {
        out[i] = a.value()[i] + b.value()[i];
    }
    Var y = tape.output(std::move(out), {&a, &b});
    if (y.requires_grad()) {
        tape.record([a, b, y]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const Tensor &g = y.grad();
            for (const Var *in : {&a, &b}) {
                if (in->requires_grad()) {
                    Tensor &gi = in->grad();
                    for (std::size_t i = 0; i < g.numel(); ++i) {
                        gi[i] += g[i];
                    }
                }
            }
        });
    }
    return y;
}

Var mul(Tape &tape, const Var &a, const Var &b) {
    require_same_shape("mul", a, b);
    Tensor out(a.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) {
        out[i] = a.value()[i] * b.value()[i];
    }
    Var y = tape.output(std::move(out), {&a, &b});
    if (y.requires_grad()) {
        tape.record([a, b, y]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const Tensor &g = y.grad();
            if (a.requires_grad()) {
                Tensor &ga = a.grad();
                for (std::size_t i = 0; i < g.numel(); ++i) {
                    ga[i] += g[i] * b.value()[i];
                }
            }
            if (b.requires_grad()) {
                Tensor &gb = b.grad();
                for (std::size_t i = 0; i < g.numel(); ++i) {
                    gb[i] += g[i] * a.value()[i];
                }
            }
        });
    }
    return y;
}

Var scale(Tape &tape, const Var &x, const Var &s) {
    require_dim("scale", "scalar", 1, s.value().numel());
    const double sv = s.value()[0];
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) {
        out[i] = x.value()[i] * sv;
    }
    Var y = tape.output(std::move(out), {&x, &s});
    if (y.requires_grad()) {
        tape.record([x, s, y]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const Tensor &g = y.grad();
            if (x.requires_grad()) {
                Tensor &gx = x.grad();
                const double sv = s.value()[0];
                for (std::size_t i = 0; i < g.numel(); ++i) {
                    gx[i] += g[i] * sv;
                }
            }
            if (s.requires_grad()) {
                double acc = 0.0;
                for (std::size_t i = 0; i < g.numel(); ++i) {
                    acc += g[i] * x.value()[i];
                }
                s.grad()[0] += acc;
            }
        });
    }
    return y;
}

namespace {
void check_channel_operand(const char *op, const Var &x, const Var &s) {
    require_rank(op, x, 4);
    require_rank(op, s, 2);
    require_dim(op, "B", x.value().dim(0), s.value().dim(0));
    require_dim(op, "C", x.value().dim(1), s.value().dim(1));
}
} // namespace

Var scale_channels(Tape &tape, const Var &x, const Var &s) {
    check_channel_operand("scale_channels", x, s);
    const Nchw d(x.value());
    const std::size_t hw = d.plane();
    Tensor out(x.shape());
    for (std::size_t item = 0; item < d.b * d.c; ++item) {
        const double sv = s.value()[item];
        for (std::size_t p = 0; p < hw; ++p) {
            out[item * hw + p] = x.value()[item * hw + p] * sv;
        }
    }
    Var y = tape.output(std::move(out), {&x, &s});
    if (y.requires_grad()) {
        tape.record([x, s, y, d, hw]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const Tensor &g = y.grad();
            for (std::size_t item = 0; item < d.b * d.c; ++item) {
                if (x.requires_grad()) {
                    Tensor &gx = x.grad();
                    const double sv = s.value()[item];
                    for (std::size_t p = 0; p < hw; ++p) {
                        gx[item * hw + p] += g[item * hw + p] * sv;
                    }
                }
                if (s.requires_grad()) {
                    double acc = 0.0;
                    for (std::size_t p = 0; p < hw; ++p) {
                        acc += g[item * hw + p] * x.value()[item * hw + p];
                    }
                    s.grad()[item] += acc;
                }
            }
        });
    }
    return y;
}

Var shift_channels(Tape &tape, const Var &x, const Var &s) {
    check_channel_operand("shift_channels", x, s);
    const Nchw d(x.value());
    const std::size_t hw = d.plane();
    Tensor out(x.shape());
    for (std::size_t item = 0; item < d.b * d.c; ++item) {
        const double sv = s.value()[item];
        for (std::size_t p = 0; p < hw; ++p) {
            out[item * hw + p] = x.value()[item * hw + p] + sv;
        }
    }
    Var y = tape.output(std::move(out), {&x, &s});
    if (y.requires_grad()) {
        tape.record([x, s, y, d, hw]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const Tensor &g = y.grad();
            for (std::size_t item = 0; item < d.b * d.c; ++item) {
                double acc = 0.0;
                for (std::size_t p = 0; p < hw; ++p) {
                    acc += g[item * hw + p];
                }
                if (x.requires_grad()) {
                    Tensor &gx = x.grad();
                    for (std::size_t p = 0; p < hw; ++p) {
                        gx[item * hw + p] += g[item * hw + p];
                    }
                }
                if (s.requires_grad()) {
                    s.grad()[item] += acc;
                }
            }
        });
    }
    return y;
}

Var broadcast_spatial(Tape &tape, const Var &x, std::size_t h, std::size_t w) {
    require_rank("broadcast_spatial", x, 2);
    const std::size_t bc = x.value().numel();
    const std::size_t hw = h * w;
    Tensor out({x.value().dim(0), x.value().dim(1), h, w});
    for (std::size_t item = 0; item < bc; ++item) {
        std::fill(out.raw() + item * hw, out.raw() + (item + 1) * hw,
                  x.value()[item]);
    }
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, bc, hw]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const double *g = y.grad().raw();
            Tensor &gx = x.grad();
            for (std::size_t item = 0; item < bc; ++item) {
                gx[item] += std::accumulate(g + item * hw, g + (item + 1) * hw, 0.0);
            }
        });
    }
    return y;
}

Var concat_channels(Tape &tape, const Var &a, const Var &b) {
    constexpr const char *op = "concat_channels";
    require_rank(op, a, 4);
    require_rank(op, b, 4);
    const Nchw sa(a.value());
    const Nchw sb(b.value());
    require_dim(op, "B", sa.b, sb.b);
    require_dim(op, "H", sa.h, sb.h);
    require_dim(op, "W", sa.w, sb.w);
    const std::size_t hw = sa.plane();
    const std::size_t c = sa.c + sb.c;
    Tensor out({sa.b, c, sa.h, sa.w});
    for (std::size_t n = 0; n < sa.b; ++n) {
        std::copy_n(a.value().raw() + n * sa.c * hw, sa.c * hw,
                    out.raw() + n * c * hw);
        std::copy_n(b.value().raw() + n * sb.c * hw, sb.c * hw,
                    out.raw() + (n * c + sa.c) * hw);
    }
    Var y = tape.output(std::move(out), {&a, &b});
    if (y.requires_grad()) {
        tape.record([a, b, y, sa, sb, hw, c]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const double *g = y.grad().raw();
            for (std::size_t n = 0; n < sa.b; ++n) {
                if (a.requires_grad()) {
                    double *ga = a.grad().raw() + n * sa.c * hw;
                    const double *src = g + n * c * hw;
                    for (std::size_t i = 0; i < sa.c * hw; ++i) {
                        ga[i] += src[i];
                    }
                }
                if (b.requires_grad()) {
                    double *gb = b.grad().raw() + n * sb.c * hw;
                    const double *src = g + (n * c + sa.c) * hw;
                    for (std::size_t i = 0; i < sb.c * hw; ++i) {
                        gb[i] += src[i];
                    }
                }
            }
        });
    }
    return y;
}

Var reshape(Tape &tape, const Var &x, Shape shape) {
    Tensor out = x.value().reshaped(std::move(shape));
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const Tensor &g = y.grad();
            Tensor &gx = x.grad();
            for (std::size_t i = 0; i < g.numel(); ++i) {
                gx[i] += g[i];
            }
        });
    }
    return y;
}

Var permute(Tape &tape, const Var &x, const std::vector<std::size_t> &perm) {
    const Shape &in_shape = x.shape();
    const std::size_t rank = in_shape.size();
    if (perm.size() != rank) {
        throw DimensionError("permute", "rank", rank, perm.size());
    }
    std::vector<bool> seen(rank, false);
    Shape out_shape(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        if (perm[i] >= rank || seen[perm[i]]) {
            throw ValueError("permute: invalid axis permutation");
        }
        seen[perm[i]] = true;
        out_shape[i] = in_shape[perm[i]];
    }
    std::vector<std::size_t> in_strides(rank, 1);
    for (std::size_t i = rank; i-- > 1;) {
        in_strides[i - 1] = in_strides[i] * in_shape[i];
    }
    // Input offset of every output element, in output order.
    const std::size_t n = x.value().numel();
    std::vector<std::size_t> src(n);
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t o = 0; o < n; ++o) {
        std::size_t off = 0;
        for (std::size_t a = 0; a < rank; ++a) {
            off += idx[a] * in_strides[perm[a]];
        }
        src[o] = off;
        for (std::size_t a = rank; a-- > 0;) {
            if (++idx[a] < out_shape[a]) {
                break;
            }
            idx[a] = 0;
        }
    }
    Tensor out(out_shape);
    for (std::size_t o = 0; o < n; ++o) {
        out[o] = x.value()[src[o]];
    }
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, src = std::move(src)]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const Tensor &g = y.grad();
            Tensor &gx = x.grad();
            for (std::size_t o = 0; o < g.numel(); ++o) {
                gx[src[o]] += g[o];
            }
        });
    }
    return y;
}

Var slice_cols(Tape &tape, const Var &x, std::size_t begin, std::size_t end) {
    require_rank("slice_cols", x, 2);
    const std::size_t n = x.value().dim(0);
    const std::size_t m = x.value().dim(1);
    if (begin >= end || end > m) {
        throw DimensionError("slice_cols", "cols",
                             "range [" + std::to_string(begin) + "," +
                                 std::to_string(end) + ") outside " +
                                 std::to_string(m));
    }
    const std::size_t k = end - begin;
    Tensor out({n, k});
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < k; ++j) {
            out[r * k + j] = x.value()[r * m + begin + j];
        }
    }
    Var y = tape.output(std::move(out), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, n, m, k, begin]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const Tensor &g = y.grad();
            Tensor &gx = x.grad();
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t j = 0; j < k; ++j) {
                    gx[r * m + begin + j] += g[r * k + j];
                }
            }
        });
    }
    return y;
}

Var mixture(Tape &tape, const Var &g, const std::vector<Var> &experts) {
    constexpr const char *op = "mixture";
    require_rank(op, g, 2);
    const std::size_t b = g.value().dim(0);
    const std::size_t k = g.value().dim(1);
    require_dim(op, "experts", k, experts.size());
    const Shape &es = experts.front().shape();
    if (es.size() != 2) {
        throw DimensionError(op, "rank", 2, es.size());
    }
    require_dim(op, "B", b, es[0]);
    const std::size_t n = es[1];
    for (const auto &e : experts) {
        if (e.shape() != es) {
            throw DimensionError(op, "expert", shape_str(es) + " vs " +
                                                   shape_str(e.shape()));
        }
    }
    Tensor out({b, n});
    for (std::size_t r = 0; r < b; ++r) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t e = 0; e < k; ++e) {
                acc += g.value()[r * k + e] * experts[e].value()[r * n + j];
            }
            out[r * n + j] = acc;
        }
    }
    std::vector<Var> inputs = experts;
    inputs.push_back(g);
    Var y = tape.output(std::move(out), inputs);
    if (y.requires_grad()) {
        tape.record([g, experts, y, b, k, n]() mutable {
            if (!y.has_grad()) {
                return;
            }
            const Tensor &gy = y.grad();
            for (std::size_t e = 0; e < k; ++e) {
                Var ex = experts[e];
                if (ex.requires_grad()) {
                    Tensor &ge = ex.grad();
                    for (std::size_t r = 0; r < b; ++r) {
                        for (std::size_t j = 0; j < n; ++j) {
                            ge[r * n + j] += gy[r * n + j] * g.value()[r * k + e];
                        }
                    }
                }
                if (g.requires_grad()) {
                    Tensor &gg = g.grad();
                    for (std::size_t r = 0; r < b; ++r) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) {
                            acc += gy[r * n + j] * ex.value()[r * n + j];
                        }
                        gg[r * k + e] += acc;
                    }
                }
            }
        });
    }
    return y;
}

Var weighted_sum(Tape &tape, const Var &x, const Tensor &w) {
    if (w.shape() != x.shape()) {
        throw DimensionError("weighted_sum", "shape",
                             shape_str(x.shape()) + " vs " + shape_str(w.shape()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < w.numel(); ++i) {
        acc += w[i] * x.value()[i];
    }
    Var y = tape.output(Tensor({1}, acc), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, w]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const double g = y.grad()[0];
            Tensor &gx = x.grad();
            for (std::size_t i = 0; i < w.numel(); ++i) {
                gx[i] += g * w[i];
            }
        });
    }
    return y;
}

Var mean(Tape &tape, const Var &x) {
    const Tensor &xv = x.value();
    const auto n = static_cast<double>(xv.numel());
    const double m = std::accumulate(xv.data().begin(), xv.data().end(), 0.0) / n;
    Var y = tape.output(Tensor({1}, m), {&x});
    if (y.requires_grad()) {
        tape.record([x, y, n]() mutable {
            if (!y.has_grad() || !x.requires_grad()) {
                return;
            }
            const double g = y.grad()[0] / n;
            Tensor &gx = x.grad();
            for (std::size_t i = 0; i < gx.numel(); ++i) {
                gx[i] += g;
            }
        });
    }
    return y;
}

} // namespace hqf::ops
