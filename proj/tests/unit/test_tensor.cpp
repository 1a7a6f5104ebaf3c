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
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "doctest.h"
#include "hqf/tensor/bilinear.hpp"
#include "hqf/tensor/error.hpp"
#include "hqf/tensor/gradcheck.hpp"
#include "hqf/tensor/ops.hpp"
#include "test_util.hpp"

using namespace hqf;
using hqf::testing::away_from_zero;
using hqf::testing::random_param;
using hqf::testing::random_tensor;
using hqf::testing::smooth_coord;

namespace {

Tape inference{false};

double idx4(const Tensor &t, std::size_t b, std::size_t c, long y, long x) {
    if (y < 0 || x < 0 || y >= static_cast<long>(t.dim(2)) ||
        x >= static_cast<long>(t.dim(3))) {
        return 0.0;
    }
    return t.at({b, c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)});
}

Tensor conv1x1_oracle(const Tensor &x, const Tensor &w, const Tensor &bias) {
    Tensor out({x.dim(0), w.dim(0), x.dim(2), x.dim(3)});
    for (std::size_t b = 0; b < x.dim(0); ++b)
        for (std::size_t co = 0; co < w.dim(0); ++co)
            for (std::size_t h = 0; h < x.dim(2); ++h)
                for (std::size_t ww = 0; ww < x.dim(3); ++ww) {
                    double acc = bias[co];
                    for (std::size_t ci = 0; ci < x.dim(1); ++ci)
                        acc += w.at({co, ci}) * x.at({b, ci, h, ww});
                    out.at({b, co, h, ww}) = acc;
                }
    return out;
}

Tensor depthwise_oracle(const Tensor &x, const Tensor &k, std::size_t stride) {
    const std::size_t oh = x.dim(2) / stride;
    const std::size_t ow = x.dim(3) / stride;
    Tensor out({x.dim(0), x.dim(1), oh, ow});
    for (std::size_t b = 0; b < x.dim(0); ++b)
        for (std::size_t c = 0; c < x.dim(1); ++c)
            for (std::size_t i = 0; i < oh; ++i)
                for (std::size_t j = 0; j < ow; ++j) {
                    double acc = 0.0;
                    for (long dy = -1; dy <= 1; ++dy)
                        for (long dx = -1; dx <= 1; ++dx)
                            acc += k.at({c, static_cast<std::size_t>(dy + 1),
                                         static_cast<std::size_t>(dx + 1)}) *
                                   idx4(x, b, c, static_cast<long>(i * stride) + dy,
                                        static_cast<long>(j * stride) + dx);
                    out.at({b, c, i, j}) = acc;
                }
    return out;
}

double grad_error(const ScalarGraph &g, const std::vector<Var> &inputs,
                  std::uint64_t seed = 1) {
    GraphCheckOptions opt;
    opt.seed = seed;
    return check_graph_gradients(g, inputs, opt);
}

/// Contracts an op output against fixed random weights to get a scalar.
ScalarGraph contract(std::function<Var(Tape &, const std::vector<Var> &)> f,
                     Shape out_shape, std::uint64_t seed) {
    Rng rng(seed);
    Tensor w = random_tensor(rng, std::move(out_shape));
    return [f, w](Tape &t, const std::vector<Var> &in) {
        return ops::weighted_sum(t, f(t, in), w);
    };
}

} // namespace

TEST_SUITE("conv") {
    TEST_CASE("conv1x1 identity and ones") {
        Rng rng(3);
        Tensor x = random_tensor(rng, {1, 2, 3, 3});
        Tensor eye({2, 2}, {1, 0, 0, 1});
        CHECK(ops::conv1x1(inference, x, eye, Tensor({2}, 0.0)).value() == x);

        Tensor ones({1, 2, 1, 1}, 1.0);
        auto y = ops::conv1x1(inference, ones, Tensor({1, 2}, 1.0), Tensor({1}, 0.0));
        CHECK(y.value()[0] == 2.0);
    }

    TEST_CASE("conv1x1 matches loop oracle") {
        Rng rng(11);
        Tensor x = random_tensor(rng, {2, 3, 4, 4});
        Tensor w = random_tensor(rng, {5, 3});
        Tensor b = random_tensor(rng, {5});
        auto y = ops::conv1x1(inference, x, w, b);
        CHECK(max_abs_diff(y.value(), conv1x1_oracle(x, w, b)) <= 1e-12);
    }

    TEST_CASE("conv1x1 shape error names the axis") {
        Tensor x({1, 3, 2, 2});
        try {
            (void)ops::conv1x1(inference, x, Tensor({4, 2}), Tensor({4}));
            FAIL("expected DimensionError");
        } catch (const DimensionError &e) {
            CHECK(e.axis() == "Cin");
            CHECK(e.category() == "shape");
        }
    }

    TEST_CASE("depthwise separable delta kernel is identity") {
        Rng rng(5);
        Tensor x = random_tensor(rng, {1, 3, 5, 4});
        Tensor dw({3, 3, 3}, 0.0);
        for (std::size_t c = 0; c < 3; ++c) dw.at({c, 1, 1}) = 1.0;
        Tensor pw({3, 3}, 0.0);
        for (std::size_t c = 0; c < 3; ++c) pw.at({c, c}) = 1.0;
        auto y = ops::depthwise_separable_conv(inference, x, dw, pw, Tensor({3}), 1);
        CHECK(max_abs_diff(y.value(), x) == 0.0);
    }

    TEST_CASE("depthwise separable stride 2 halves 224") {
        Tensor x({1, 1, 224, 224}, 0.5);
        auto y = ops::depthwise_separable_conv(inference, x, Tensor({1, 3, 3}, 0.1),
                                               Tensor({2, 1}, 1.0), Tensor({2}), 2);
        CHECK(y.shape() == Shape{1, 2, 112, 112});
        Tensor odd({1, 1, 7, 5}, 1.0);
        auto z = ops::depthwise_conv3x3(inference, odd, Tensor({1, 3, 3}, 1.0), 2);
        CHECK(z.shape() == Shape{1, 1, 3, 2});
    }

    TEST_CASE("depthwise separable matches loop oracle") {
        Rng rng(17);
        for (std::size_t stride : {1u, 2u}) {
            Tensor x = random_tensor(rng, {2, 3, 6, 5});
            Tensor dw = random_tensor(rng, {3, 3, 3});
            Tensor pw = random_tensor(rng, {4, 3});
            Tensor b = random_tensor(rng, {4});
            auto y = ops::depthwise_separable_conv(inference, x, dw, pw, b, stride);
            Tensor ref = conv1x1_oracle(depthwise_oracle(x, dw, stride), pw, b);
            CHECK(max_abs_diff(y.value(), ref) <= 1e-12);
        }
    }

    TEST_CASE("transposed conv broadcasts a pixel and doubles extent") {
        auto y = ops::transposed_conv2x(inference, Tensor({1, 1, 1, 1}, 3.5),
                                        Tensor({1, 1, 2, 2}, 1.0), Tensor({1}));
        CHECK(y.value() == Tensor({1, 1, 2, 2}, 3.5));
        auto z = ops::transposed_conv2x(inference, Tensor({1, 2, 14, 14}, 1.0),
                                        Tensor({2, 3, 2, 2}, 1.0), Tensor({3}));
        CHECK(z.shape() == Shape{1, 3, 28, 28});
    }

    TEST_CASE("transposed conv matches scatter oracle") {
        Rng rng(23);
        Tensor x = random_tensor(rng, {2, 3, 3, 4});
        Tensor w = random_tensor(rng, {3, 2, 2, 2});
        Tensor b = random_tensor(rng, {2});
        Tensor ref({2, 2, 6, 8});
        for (std::size_t n = 0; n < 2; ++n)
            for (std::size_t co = 0; co < 2; ++co)
                for (std::size_t i = 0; i < 6; ++i)
                    for (std::size_t j = 0; j < 8; ++j) ref.at({n, co, i, j}) = b[co];
        for (std::size_t n = 0; n < 2; ++n)
            for (std::size_t ci = 0; ci < 3; ++ci)
                for (std::size_t i = 0; i < 3; ++i)
                    for (std::size_t j = 0; j < 4; ++j)
                        for (std::size_t co = 0; co < 2; ++co)
                            for (std::size_t a = 0; a < 2; ++a)
                                for (std::size_t c = 0; c < 2; ++c)
                                    ref.at({n, co, 2 * i + a, 2 * j + c}) +=
                                        x.at({n, ci, i, j}) * w.at({ci, co, a, c});
        auto y = ops::transposed_conv2x(inference, x, w, b);
        CHECK(max_abs_diff(y.value(), ref) <= 1e-12);
    }
}

TEST_SUITE("pooling") {
    TEST_CASE("adaptive pool identity and block means") {
        Rng rng(2);
        Tensor x = random_tensor(rng, {1, 2, 3, 3});
        CHECK(ops::adaptive_avg_pool(inference, x, 3).value() == x);

        Tensor d({1, 1, 4, 4});
        std::iota(d.data().begin(), d.data().end(), 0.0);
        auto y = ops::adaptive_avg_pool(inference, d, 2).value();
        CHECK(y[0] == doctest::Approx((0 + 1 + 4 + 5) / 4.0));
        CHECK(y[3] == doctest::Approx((10 + 11 + 14 + 15) / 4.0));
    }

    TEST_CASE("adaptive pool matches floor/ceil window oracle on 14 -> 4") {
        Rng rng(8);
        Tensor x = random_tensor(rng, {2, 3, 14, 14});
        auto y = ops::adaptive_avg_pool(inference, x, 4).value();
        CHECK(y.shape() == Shape{2, 3, 4, 4});
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t c = 0; c < 3; ++c)
                for (std::size_t i = 0; i < 4; ++i)
                    for (std::size_t j = 0; j < 4; ++j) {
                        const std::size_t r0 = i * 14 / 4, r1 = ((i + 1) * 14 + 3) / 4;
                        const std::size_t c0 = j * 14 / 4, c1 = ((j + 1) * 14 + 3) / 4;
                        double s = 0.0;
                        for (std::size_t r = r0; r < r1; ++r)
                            for (std::size_t q = c0; q < c1; ++q) s += x.at({b, c, r, q});
                        CHECK(y.at({b, c, i, j}) ==
                              doctest::Approx(s / double((r1 - r0) * (c1 - c0))).epsilon(1e-13));
                    }
        CHECK_THROWS_AS((void)ops::adaptive_avg_pool(inference, x, 15), DimensionError);
    }

    TEST_CASE("adaptive pool preserves the global mean for exact divisors") {
        Rng rng(41);
        for (int trial = 0; trial < 20; ++trial) {
            Tensor x = random_tensor(rng, {1, 1, 12, 8});
            const std::size_t s = trial % 2 == 0 ? 4 : 2;
            auto y = ops::adaptive_avg_pool(inference, x, s).value();
            const double mx = std::accumulate(x.data().begin(), x.data().end(), 0.0) / x.numel();
            const double my = std::accumulate(y.data().begin(), y.data().end(), 0.0) / y.numel();
            CHECK(std::abs(mx - my) <= 1e-12);
        }
    }
}

TEST_SUITE("bilinear") {
    TEST_CASE("sample at a pixel centre and between pixels") {
        Tensor v({1, 1, 2, 3}, {1, 2, 3, 4, 5, 6});
        const auto centre = [](std::size_t i, std::size_t n) {
            return (2.0 * i + 1.0) / n - 1.0;
        };
        Tensor coords({1, 3, 2}, {centre(2, 3), centre(1, 2), 0.0, centre(0, 2),
                                  -3.0, -3.0});
        auto y = ops::bilinear_sample(inference, v, coords).value();
        CHECK(y[0] == doctest::Approx(6.0).epsilon(1e-15));
        CHECK(y[1] == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(y[2] == 0.0);
        Tensor mid({1, 1, 2}, {(centre(0, 3) + centre(1, 3)) / 2, centre(0, 2)});
        CHECK(ops::bilinear_sample(inference, v, mid).value()[0] ==
              doctest::Approx(1.5).epsilon(1e-15));
    }

    TEST_CASE("sample matches closed-form four-neighbour oracle") {
        Rng rng(13);
        Tensor v = random_tensor(rng, {2, 3, 5, 7});
        Tensor coords = random_tensor(rng, {2, 20, 2}, -1.2, 1.2);
        auto y = ops::bilinear_sample(inference, v, coords).value();
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t p = 0; p < 20; ++p) {
                const double px = ((coords.at({b, p, 0}) + 1) * 7 - 1) / 2;
                const double py = ((coords.at({b, p, 1}) + 1) * 5 - 1) / 2;
                const long x0 = static_cast<long>(std::floor(px));
                const long y0 = static_cast<long>(std::floor(py));
                const double ax = px - x0, ay = py - y0;
                for (std::size_t c = 0; c < 3; ++c) {
                    const double ref = (1 - ax) * (1 - ay) * idx4(v, b, c, y0, x0) +
                                       ax * (1 - ay) * idx4(v, b, c, y0, x0 + 1) +
                                       (1 - ax) * ay * idx4(v, b, c, y0 + 1, x0) +
                                       ax * ay * idx4(v, b, c, y0 + 1, x0 + 1);
                    CHECK(std::abs(y.at({b, c, p}) - ref) <= 1e-12);
                }
            }
    }

    TEST_CASE("sample is linear in the value map") {
        Rng rng(19);
        for (int trial = 0; trial < 20; ++trial) {
            Tensor v1 = random_tensor(rng, {1, 2, 4, 4});
            Tensor v2 = random_tensor(rng, {1, 2, 4, 4});
            Tensor coords = random_tensor(rng, {1, 9, 2}, -1.1, 1.1);
            const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
            Tensor mix(v1.shape());
            for (std::size_t i = 0; i < mix.numel(); ++i) mix[i] = a * v1[i] + b * v2[i];
            auto s1 = ops::bilinear_sample(inference, v1, coords).value();
            auto s2 = ops::bilinear_sample(inference, v2, coords).value();
            auto sm = ops::bilinear_sample(inference, mix, coords).value();
            for (std::size_t i = 0; i < sm.numel(); ++i)
                CHECK(std::abs(sm[i] - (a * s1[i] + b * s2[i])) <= 1e-12);
        }
    }

    TEST_CASE("non-finite coordinates are rejected") {
        Tensor v({1, 1, 2, 2}, 1.0);
        Tensor c({1, 1, 2}, {NAN, 0.0});
        CHECK_THROWS_AS((void)ops::bilinear_sample(inference, v, c), NumericError);
    }

    TEST_CASE("upsample identity, constant and 2x2 -> 4x4") {
        Rng rng(29);
        Tensor x = random_tensor(rng, {1, 2, 3, 3});
        CHECK(ops::bilinear_upsample(inference, x, 3, 3).value() == x);

        auto c = ops::bilinear_upsample(inference, Tensor({1, 1, 1, 1}, 2.5), 5, 4).value();
        CHECK(c == Tensor({1, 1, 5, 4}, 2.5));

        // Target pixel centres at source positions -0.25, 0.25, 0.75, 1.25,
        // clamped to the border.
        Tensor s({1, 1, 2, 2}, {1, 2, 3, 4});
        auto y = ops::bilinear_upsample(inference, s, 4, 4).value();
        const double pos[4] = {0.0, 0.25, 0.75, 1.0};
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                const double ref = 1 + pos[j] + 2 * pos[i];
                CHECK(std::abs(y.at({0, 0, i, j}) - ref) <= 1e-12);
            }
    }
}

TEST_SUITE("pointwise") {
    TEST_CASE("sigmoid, tanh, linear, softmax basics") {
        CHECK(ops::sigmoid(inference, Tensor({1}, 0.0)).value()[0] == 0.5);
        auto t = ops::tanh(inference, Tensor({3}, {-40.0, 0.3, 40.0})).value();
        CHECK(t[1] == doctest::Approx(std::tanh(0.3)));
        CHECK(std::abs(t[0]) <= 1.0);
        auto sm = ops::softmax(inference, Tensor({1, 3}, 4.2)).value();
        for (double v : sm.data()) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-15));
        Tensor c({2}, {0.7, -1.5});
        auto lin = ops::linear(inference, Tensor({3, 4}, 9.0), Tensor({2, 4}, 0.0), c).value();
        for (std::size_t r = 0; r < 3; ++r) {
            CHECK(lin.at({r, 0}) == 0.7);
            CHECK(lin.at({r, 1}) == -1.5);
        }
        CHECK_THROWS_AS((void)ops::softmax(inference, Tensor()), DimensionError);
    }

    TEST_CASE("softmax rows sum to one and are permutation equivariant") {
        Rng rng(31);
        for (int trial = 0; trial < 100; ++trial) {
            Tensor x = random_tensor(rng, {3, 5}, -10, 10);
            auto y = ops::softmax(inference, x).value();
            for (std::size_t r = 0; r < 3; ++r) {
                double s = 0.0;
                for (std::size_t k = 0; k < 5; ++k) s += y.at({r, k});
                CHECK(std::abs(s - 1.0) <= 1e-12);
            }
            Tensor xp = x;
            for (std::size_t r = 0; r < 3; ++r) std::swap(xp.at({r, 0}), xp.at({r, 3}));
            auto yp = ops::softmax(inference, xp).value();
            for (std::size_t r = 0; r < 3; ++r) {
                CHECK(std::abs(yp.at({r, 0}) - y.at({r, 3})) <= 1e-15);
                CHECK(std::abs(yp.at({r, 3}) - y.at({r, 0})) <= 1e-15);
                CHECK(std::abs(yp.at({r, 1}) - y.at({r, 1})) <= 1e-15);
            }
        }
    }

    TEST_CASE("forward ops keep finite inputs finite") {
        Rng rng(37);
        Tensor x = random_tensor(rng, {2, 3, 4, 4}, -800, 800);
        CHECK(ops::sigmoid(inference, x).value().all_finite());
        CHECK(ops::tanh(inference, x).value().all_finite());
        CHECK(ops::softmax(inference, x).value().all_finite());
    }
}

TEST_SUITE("gradcheck") {
    TEST_CASE("central differences on closed forms") {
        const ScalarFn sq = [](std::span<const double> t) { return t[0] * t[0]; };
        const std::vector<double> three{3.0};
        // A power-of-two step keeps every intermediate exact.
        CHECK(central_difference(sq, three, 0x1p-10)[0] == 6.0);
        CHECK(std::abs(central_difference(sq, three)[0] - 6.0) <= 1e-10);
        const ScalarFn sn = [](std::span<const double> t) { return std::sin(t[0]); };
        const std::vector<double> zero{0.0};
        CHECK(std::abs(central_difference(sn, zero)[0] - 1.0) <= 1e-6);
        const std::vector<double> analytic{1.0};
        CHECK(finite_diff_check(sn, zero, analytic).max_rel_error <= 1e-6);
        const ScalarFn bad = [](std::span<const double>) { return NAN; };
        CHECK_THROWS_AS((void)finite_diff_check(bad, zero, analytic), NumericError);
    }

    TEST_CASE("every layer matches finite differences over 100 configurations") {
        struct Case {
            const char *name;
            std::function<double(Rng &, std::uint64_t)> run;
        };
        const auto check4 = [](Rng &rng, std::uint64_t seed, Shape out,
                               std::vector<Var> in, auto f) {
            return grad_error(contract(f, std::move(out), seed), in, seed);
        };
        const std::vector<Case> cases = {
            {"conv1x1",
             [&](Rng &r, std::uint64_t s) {
                 return check4(r, s, {2, 3, 3, 2},
                               {random_param(r, {2, 2, 3, 2}), random_param(r, {3, 2}),
                                random_param(r, {3})},
                               [](Tape &t, const std::vector<Var> &in) {
                                   return ops::conv1x1(t, in[0], in[1], in[2]);
                               });
             }},
            {"depthwise_separable",
             [&](Rng &r, std::uint64_t s) {
                 const std::size_t stride = 1 + s % 2;
                 const std::size_t o = stride == 1 ? 5 : 2;
                 return check4(r, s, {1, 3, o, o},
                               {random_param(r, {1, 2, 5, 5}), random_param(r, {2, 3, 3}),
                                random_param(r, {3, 2}), random_param(r, {3})},
                               [stride](Tape &t, const std::vector<Var> &in) {
                                   return ops::depthwise_separable_conv(t, in[0], in[1], in[2],
                                                                        in[3], stride);
                               });
             }},
            {"transposed_conv2x",
             [&](Rng &r, std::uint64_t s) {
                 return check4(r, s, {1, 2, 4, 6},
                               {random_param(r, {1, 3, 2, 3}), random_param(r, {3, 2, 2, 2}),
                                random_param(r, {2})},
                               [](Tape &t, const std::vector<Var> &in) {
                                   return ops::transposed_conv2x(t, in[0], in[1], in[2]);
                               });
             }},
            {"adaptive_avg_pool",
             [&](Rng &r, std::uint64_t s) {
                 return check4(r, s, {1, 2, 3, 2}, {random_param(r, {1, 2, 7, 5})},
                               [](Tape &t, const std::vector<Var> &in) {
                                   return ops::adaptive_avg_pool(t, in[0], 3, 2);
                               });
             }},
            {"bilinear_sample",
             [&](Rng &r, std::uint64_t s) {
                 Tensor c({1, 6, 2});
                 for (std::size_t p = 0; p < 6; ++p) {
                     c.at({0, p, 0}) = smooth_coord(r, 5);
                     c.at({0, p, 1}) = smooth_coord(r, 4);
                 }
                 return check4(r, s, {1, 2, 6}, {random_param(r, {1, 2, 4, 5}), Var(c, true)},
                               [](Tape &t, const std::vector<Var> &in) {
                                   return ops::bilinear_sample(t, in[0], in[1]);
                               });
             }},
            {"bilinear_upsample",
             [&](Rng &r, std::uint64_t s) {
                 return check4(r, s, {1, 2, 7, 5}, {random_param(r, {1, 2, 3, 2})},
                               [](Tape &t, const std::vector<Var> &in) {
                                   return ops::bilinear_upsample(t, in[0], 7, 5);
                               });
             }},
            {"activations",
             [&](Rng &r, std::uint64_t s) {
                 Var x(away_from_zero(r, {2, 5}), true);
                 return check4(r, s, {2, 5}, {x}, [](Tape &t, const std::vector<Var> &in) {
                     Var a = ops::tanh(t, in[0]);
                     Var b = ops::sigmoid(t, in[0]);
                     Var c = ops::relu(t, in[0]);
                     return ops::add(t, ops::mul(t, a, b), ops::softmax(t, ops::add(t, c, a)));
                 });
             }},
            {"linear",
             [&](Rng &r, std::uint64_t s) {
                 return check4(r, s, {3, 2},
                               {random_param(r, {3, 4}), random_param(r, {2, 4}),
                                random_param(r, {2})},
                               [](Tape &t, const std::vector<Var> &in) {
                                   return ops::linear(t, in[0], in[1], in[2]);
                               });
             }},
            {"channel ops",
             [&](Rng &r, std::uint64_t s) {
                 return check4(
                     r, s, {2, 6, 3, 3},
                     {random_param(r, {2, 3, 3, 3}), random_param(r, {2, 3}),
                      random_param(r, {2, 3}), random_param(r, {1})},
                     [](Tape &t, const std::vector<Var> &in) {
                         Var g = ops::global_avg_pool(t, in[0]);
                         Var a = ops::scale_channels(t, in[0], ops::add(t, in[1], g));
                         Var b = ops::shift_channels(t, ops::scale(t, in[0], in[3]), in[2]);
                         Var c = ops::add(t, a, ops::broadcast_spatial(t, in[1], 3, 3));
                         return ops::concat_channels(t, c, b);
                     });
             }},
            {"layout ops",
             [&](Rng &r, std::uint64_t s) {
                 return check4(r, s, {3, 2},
                               {random_param(r, {2, 3, 4}), random_param(r, {3, 2})},
                               [](Tape &t, const std::vector<Var> &in) {
                                   Var p = ops::permute(t, in[0], {1, 0, 2});
                                   Var q = ops::reshape(t, p, {3, 8});
                                   Var sl = ops::slice_cols(t, q, 2, 6);
                                   Var g = ops::softmax(t, in[1]);
                                   Var e1 = ops::slice_cols(t, sl, 0, 2);
                                   Var e2 = ops::slice_cols(t, sl, 2, 4);
                                   return ops::add(t, ops::mixture(t, g, {e1, e2}),
                                                   ops::mul(t, e1, e2));
                               });
             }},
            {"mean",
             [&](Rng &r, std::uint64_t s) {
                 return check4(r, s, {1}, {random_param(r, {3, 4})},
                               [](Tape &t, const std::vector<Var> &in) {
                                   return ops::mean(t, ops::mul(t, in[0], in[0]));
                               });
             }},
        };
        for (const auto &c : cases) {
            Rng rng(fnv1a(c.name));
            double worst = 0.0;
            for (std::uint64_t cfg = 0; cfg < 100; ++cfg) {
                worst = std::max(worst, c.run(rng, cfg));
            }
            INFO(c.name);
            CHECK(worst <= 1e-5);
        }
    }

    TEST_CASE("replaying the tape twice gives bit-identical gradients") {
        const auto run = [] {
            Rng rng(99);
            Var x = random_param(rng, {1, 2, 6, 6});
            Var dw = random_param(rng, {2, 3, 3});
            Var pw = random_param(rng, {3, 2});
            Var b = random_param(rng, {3});
            Tape tape;
            Var y = ops::depthwise_separable_conv(tape, x, dw, pw, b, 2);
            Var loss = ops::mean(tape, ops::mul(tape, y, y));
            tape.backward(loss);
            return std::vector<Tensor>{x.grad(), dw.grad(), pw.grad(), b.grad()};
        };
        CHECK(run() == run());
    }

    TEST_CASE("ops on constants record nothing") {
        Tape tape;
        Var y = ops::tanh(tape, Tensor({2}, 0.5));
        CHECK_FALSE(y.requires_grad());
        CHECK(tape.size() == 0);
    }
}
