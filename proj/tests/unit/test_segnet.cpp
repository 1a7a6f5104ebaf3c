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
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hqf/segnet/net.hpp"
#include "hqf/tensor/binary_io.hpp"
#include "hqf/tensor/error.hpp"
#include "hqf/tensor/gradcheck.hpp"
#include "hqf/tensor/ops.hpp"
#include "test_util.hpp"

using namespace hqf;
using namespace hqf::segnet;
using hqf::testing::random_tensor;

namespace {

Tape inference{false};

NetConfig toy32() {
    NetConfig cfg = NetConfig::toy();
    cfg.input = 32;
    return cfg;
}

std::vector<std::string> ids_for(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("img" + std::to_string(i));
    return ids;
}

Tensor run(const HqfNet &net, const Tensor &image, const SemanticFeatureProvider &provider,
           quantum::ShapeTrace *trace = nullptr) {
    const auto sem = net.gather_semantic(provider, ids_for(image.dim(0)));
    return net.forward(inference, Var(image), sem, trace).value();
}

std::filesystem::path scratch_dir(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / ("hqf_segnet_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE("config") {
    TEST_CASE("ladder scales with the width factor") {
        NetConfig cfg;
        CHECK(cfg.ladder() == std::array<std::size_t, 5>{64, 128, 256, 512, 1024});
        cfg.width = 0.125;
        CHECK(cfg.ladder() == std::array<std::size_t, 5>{8, 16, 32, 64, 128});
        CHECK(cfg.semantic_channels() == 128);
    }

    TEST_CASE("input must be a multiple of 16") {
        NetConfig cfg = NetConfig::toy();
        cfg.input = 40;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        CHECK_THROWS_AS(HqfNet(cfg, 1), ConfigError);
    }

    TEST_CASE("levels that the query stride cannot divide are rejected") {
        NetConfig cfg = NetConfig::toy();
        cfg.input = 48;  // bottom level 3 x 3
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.variant = {Fusion::None, true, true};
        CHECK_NOTHROW(cfg.validate());
    }

    TEST_CASE("fusion names round-trip") {
        for (auto f : {Fusion::None, Fusion::Add, Fusion::Mul, Fusion::Dmcaf})
            CHECK(parse_fusion(fusion_name(f)) == f);
        CHECK_THROWS_AS((void)parse_fusion("concat"), ConfigError);
    }

    TEST_CASE("ablation ladder lists six variants ending at the full model") {
        const auto ladder = ablation_ladder();
        REQUIRE(ladder.size() == 6);
        CHECK(ladder.front().name == "mul");
        CHECK(ladder.back().variant.fusion == Fusion::Dmcaf);
        CHECK(ladder.back().variant.qskip);
        CHECK(ladder.back().variant.qmoe);
    }
}

TEST_SUITE("provider") {
    TEST_CASE("synthetic features are deterministic in seed, id and level") {
        SyntheticProvider a(5), b(5), c(6);
        const FeatureGeometry g{16, 4, 4};
        const Tensor t = a.features("x", 2, g);
        CHECK(t.shape() == Shape{16, 4, 4});
        CHECK(t == b.features("x", 2, g));
        CHECK(t != c.features("x", 2, g));
        CHECK(t != a.features("y", 2, g));
        CHECK(t != a.features("x", 3, g));
    }

    TEST_CASE("synthetic fields are smooth") {
        SyntheticProvider p(1);
        const Tensor t = p.features("s", 2, {8, 32, 32});
        // Frequencies are at most 2 cycles per map, so neighbours move by
        // at most about 2*pi*2/32 times the total amplitude.
        double worst = 0.0;
        for (std::size_t c = 0; c < 8; ++c)
            for (std::size_t y = 0; y < 32; ++y)
                for (std::size_t x = 0; x + 1 < 32; ++x)
                    worst = std::max(worst, std::abs(t.at({c, y, x + 1}) - t.at({c, y, x})));
        CHECK(worst < 2.0);
        CHECK(t.all_finite());
    }

    TEST_CASE("feature file round-trip is bit-identical") {
        const auto dir = scratch_dir("roundtrip");
        Rng rng(2);
        const Tensor t = binio::snap_to_f32(random_tensor(rng, {3, 5, 7}, -4, 4));
        write_feature_file(dir / "a.hqft", t);
        const Tensor r = read_feature_file(dir / "a.hqft");
        CHECK(r == t);
        write_feature_file(dir / "b.hqft", r);
        std::ifstream fa(dir / "a.hqft", std::ios::binary), fb(dir / "b.hqft", std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(fa)), {});
        const std::string sb((std::istreambuf_iterator<char>(fb)), {});
        CHECK(sa == sb);
        CHECK(sa.substr(0, 4) == "HQFT");
        CHECK(sa.size() == 4 + 4 + 3 * 4 + 105 * 4);
    }

    TEST_CASE("file provider reads the manifest and checks shapes") {
        const auto dir = scratch_dir("manifest");
        Rng rng(3);
        const Tensor t = binio::snap_to_f32(random_tensor(rng, {4, 2, 2}));
        write_feature_file(dir / "s2.hqft", t);
        std::ofstream(dir / "manifest.json") << R"({"tile": {"2": "s2.hqft", "3": "gone.hqft"}})";
        FileProvider p(dir / "manifest.json");
        CHECK(p.sample_count() == 1);
        CHECK(p.features("tile", 2, {4, 2, 2}) == t);
        CHECK_THROWS_AS((void)p.features("tile", 2, {4, 4, 4}), DataError);
        CHECK_THROWS_AS((void)p.features("other", 2, {4, 2, 2}), DataError);
        CHECK_THROWS_AS((void)p.features("tile", 4, {4, 2, 2}), DataError);
        CHECK_THROWS_AS((void)p.features("tile", 3, {4, 2, 2}), IoError);
    }

    TEST_CASE("corrupt feature files are rejected") {
        const auto dir = scratch_dir("corrupt");
        std::ofstream(dir / "bad.hqft", std::ios::binary) << "HQFX";
        CHECK_THROWS_AS((void)read_feature_file(dir / "bad.hqft"), IoError);
        std::ofstream(dir / "short.hqft", std::ios::binary) << "HQFT\x02";
        CHECK_THROWS_AS((void)read_feature_file(dir / "short.hqft"), IoError);
        CHECK_THROWS_AS((void)FileProvider(dir / "missing.json"), IoError);
    }

    TEST_CASE("provider output carries no trainable state") {
        HqfNet net(toy32(), 1);
        const std::size_t before = net.parameter_count();
        SyntheticProvider p(1);
        const auto sem = net.gather_semantic(p, ids_for(2));
        CHECK(net.parameter_count() == before);
        REQUIRE(sem.size() == 3);
        CHECK(sem[0].shape() == Shape{2, 128, 4, 4});
        CHECK(sem[2].shape() == Shape{2, 128, 1, 1});
        Rng rng(1);
        Tape tape;
        Var y = ops::mean(tape, net.forward(tape, Var(random_tensor(rng, {2, 3, 32, 32})), sem));
        tape.backward(y);
        for (const auto &item : net.parameters().items()) {
            CAPTURE(item.name);
            CHECK(item.var.has_grad());
            CHECK(item.name.rfind("provider", 0) == std::string::npos);
        }
    }
}

TEST_SUITE("baseline fusion") {
    TEST_CASE("add with zeros and mul with ones are identities") {
        Rng rng(4);
        const Var u(random_tensor(rng, {2, 3, 4, 4}));
        CHECK(baseline_fuse(inference, u, Var(Tensor({2, 3, 4, 4}, 0.0)), Fusion::Add).value() ==
              u.value());
        CHECK(baseline_fuse(inference, u, Var(Tensor({2, 3, 4, 4}, 1.0)), Fusion::Mul).value() ==
              u.value());
        CHECK_THROWS_AS((void)baseline_fuse(inference, u, u, Fusion::Dmcaf), ValueError);
    }

    TEST_CASE("projection and fusion match a loop oracle") {
        Rng rng(5);
        const Tensor d = random_tensor(rng, {1, 4, 2, 2});
        const Tensor w = random_tensor(rng, {3, 4});
        const Tensor b = random_tensor(rng, {3});
        const Tensor u = random_tensor(rng, {1, 3, 4, 4});
        const Tensor dp = project_semantic(inference, Var(d), Var(w), Var(b), 4, 4).value();
        // 2 -> 4 with half-pixel centres: source coordinate (i + 0.5)/2 - 0.5, clamped.
        const auto src = [](std::size_t i) {
            return std::clamp((static_cast<double>(i) + 0.5) / 2.0 - 0.5, 0.0, 1.0);
        };
        double worst = 0.0;
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t y = 0; y < 4; ++y)
                for (std::size_t x = 0; x < 4; ++x) {
                    const double sy = src(y), sx = src(x);
                    double v = 0.0;
                    for (std::size_t yy = 0; yy < 2; ++yy)
                        for (std::size_t xx = 0; xx < 2; ++xx) {
                            double proj = b[c];
                            for (std::size_t k = 0; k < 4; ++k)
                                proj += w.at({c, k}) * d.at({0, k, yy, xx});
                            const double wy = yy == 0 ? 1.0 - sy : sy;
                            const double wx = xx == 0 ? 1.0 - sx : sx;
                            v += wy * wx * proj;
                        }
                    worst = std::max(worst, std::abs(v - dp.at({0, c, y, x})));
                }
        CHECK(worst <= 1e-12);

        const Tensor add = baseline_fuse(inference, Var(u), Var(dp), Fusion::Add).value();
        const Tensor mul = baseline_fuse(inference, Var(u), Var(dp), Fusion::Mul).value();
        double e = 0.0;
        for (std::size_t i = 0; i < u.numel(); ++i) {
            e = std::max(e, std::abs(add[i] - (u[i] + dp[i])));
            e = std::max(e, std::abs(mul[i] - u[i] * dp[i]));
        }
        CHECK(e <= 1e-12);
    }
}

TEST_SUITE("network") {
    TEST_CASE("every ablation variant runs on a 64 x 64 input") {
        SyntheticProvider provider(3);
        Rng rng(6);
        const Tensor image = random_tensor(rng, {2, 3, 64, 64}, 0, 1);
        for (const auto &nv : ablation_ladder()) {
            CAPTURE(nv.name);
            NetConfig cfg = NetConfig::toy();
            cfg.variant = nv.variant;
            HqfNet net(cfg, 11);
            const Tensor logits = run(net, image, provider);
            CHECK(logits.shape() == Shape{2, 3, 64, 64});
            CHECK(logits.all_finite());
        }
    }

    TEST_CASE("parameter count is monotone along the ablation ladder") {
        for (std::size_t qubits : {8u, 16u}) {
            std::size_t previous = 0;
            std::size_t full = 0;
            std::vector<std::size_t> counts;
            for (const auto &nv : ablation_ladder()) {
                NetConfig cfg = NetConfig::toy();
                cfg.n_qubits = qubits;
                cfg.variant = nv.variant;
                const std::size_t n = HqfNet(cfg, 1).parameter_count();
                CAPTURE(nv.name);
                CHECK(n >= previous);
                previous = n;
                full = n;
                counts.push_back(n);
            }
            for (std::size_t i = 0; i + 1 < counts.size(); ++i) CHECK(full > counts[i]);
        }
    }

    TEST_CASE("plain variant equals a hand-assembled encoder-decoder") {
        NetConfig cfg = toy32();
        cfg.variant = {Fusion::None, false, false};
        HqfNet net(cfg, 2);
        CHECK(net.semantic_geometry().empty());
        Rng rng(7);
        const Tensor image = random_tensor(rng, {1, 3, 32, 32});
        const Tensor a = net.forward(inference, Var(image), {}).value();

        const auto &ps = net.parameters();
        const auto p = [&](const std::string &n) { return ps.find(n)->var; };
        const auto block = [&](const Var &x, const std::string &pre, std::size_t stride) {
            const auto sep = [&](const Var &in, const std::string &q, std::size_t s) {
                return ops::relu(inference, ops::depthwise_separable_conv(
                                                inference, in, p(q + ".dw"), p(q + ".pw"),
                                                p(q + ".b"), s));
            };
            return sep(sep(x, pre + ".a", stride), pre + ".b", 1);
        };
        std::vector<Var> lv;
        Var x(image);
        for (std::size_t l = 0; l < 5; ++l) {
            x = block(x, "enc." + std::to_string(l), l == 0 ? 1 : 2);
            lv.push_back(x);
        }
        x = block(x, "bottleneck", 1);
        for (std::size_t l = 4; l-- > 0;) {
            const std::string s = std::to_string(l);
            const Var up = ops::transposed_conv2x(inference, x, p("up." + s + ".w"), p("up." + s + ".b"));
            x = block(ops::concat_channels(inference, up, lv[l]), "dec." + s, 1);
        }
        const Tensor b = ops::conv1x1(inference, x, p("head.w"), p("head.b")).value();
        CHECK(a == b);
    }

    TEST_CASE("QSkip disabled passes skips through; enabled rescales them") {
        SyntheticProvider provider(1);
        Rng rng(8);
        const Tensor image = random_tensor(rng, {1, 3, 32, 32});
        for (bool qskip : {false, true}) {
            NetConfig cfg = toy32();
            cfg.variant = {Fusion::Dmcaf, qskip, false};
            HqfNet net(cfg, 3);
            const auto enc = net.encode(inference, Var(image),
                                        net.gather_semantic(provider, ids_for(1)));
            for (std::size_t l = 0; l < 4; ++l) {
                const Tensor &u = enc.levels[l].value();
                const Tensor &s = enc.skips[l].value();
                if (!qskip) {
                    CHECK(s == u);
                    continue;
                }
                // Encoder levels end in ReLU, so u >= 0 and u <= s <= 2u.
                bool bounded = true;
                bool changed = false;
                for (std::size_t i = 0; i < u.numel(); ++i) {
                    bounded = bounded && s[i] >= u[i] && s[i] <= 2.0 * u[i];
                    changed = changed || (u[i] > 0.0 && s[i] != u[i]);
                }
                CHECK(bounded);
                CHECK(changed);
            }
        }
    }

    TEST_CASE("two forwards are bit-identical; same seed gives the same network") {
        NetConfig cfg = NetConfig::toy();
        SyntheticProvider provider(9);
        Rng rng(9);
        const Tensor image = random_tensor(rng, {2, 3, 64, 64});
        HqfNet a(cfg, 21), b(cfg, 21), c(cfg, 22);
        const Tensor ya = run(a, image, provider);
        CHECK(ya == run(a, image, provider));
        CHECK(ya == run(b, image, provider));
        CHECK(ya != run(c, image, provider));
    }

    TEST_CASE("width 0.125 bottom level has 128 channels at 1/16 resolution") {
        NetConfig cfg = NetConfig::toy();
        HqfNet net(cfg, 4);
        SyntheticProvider provider(2);
        Rng rng(10);
        quantum::ShapeTrace trace;
        (void)run(net, random_tensor(rng, {1, 3, 64, 64}), provider, &trace);
        CHECK(*trace.find("U.4") == Shape{1, 128, 4, 4});
        CHECK(*trace.find("U.1") == Shape{1, 16, 32, 32});
        CHECK(*trace.find("X_B") == Shape{1, 128, 4, 4});
        CHECK(*trace.find("logits") == Shape{1, 3, 64, 64});
    }

    TEST_CASE("input shape errors name the axis") {
        HqfNet net(toy32(), 5);
        SyntheticProvider provider(1);
        const auto sem = net.gather_semantic(provider, ids_for(1));
        CHECK_THROWS_AS((void)net.forward(inference, Var(Tensor({1, 3, 64, 64})), sem),
                        DimensionError);
        CHECK_THROWS_AS((void)net.forward(inference, Var(Tensor({1, 3, 32, 32})), {}),
                        DimensionError);
    }

    TEST_CASE("full network gradient matches finite differences on 50 parameters") {
        NetConfig cfg = toy32();
        HqfNet net(cfg, 6);
        SyntheticProvider provider(4);
        Rng rng(11);
        const Var image(random_tensor(rng, {1, 3, 32, 32}, 0, 1));
        const auto sem = net.gather_semantic(provider, ids_for(1));
        const Tensor w = random_tensor(rng, {1, 3, 32, 32});
        std::vector<Var> inputs;
        for (const auto &p : net.parameters().items()) inputs.push_back(p.var);
        const ScalarGraph g = [&](Tape &t, const std::vector<Var> &) {
            return ops::weighted_sum(t, net.forward(t, image, sem), w);
        };
        GraphCheckOptions opt;
        opt.max_coords = 50;
        opt.seed = 3;
        opt.h = 1e-5;
        const double err = check_graph_gradients(g, inputs, opt);
        MESSAGE("worst relative error " << err);
        CHECK(err <= 1e-3);
    }
}
