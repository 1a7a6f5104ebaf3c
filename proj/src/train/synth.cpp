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
#include "hqf/train/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "hqf/tensor/error.hpp"
#include "hqf/tensor/random.hpp"

namespace hqf::train {

namespace {

constexpr std::size_t kMaxAttempts = 10000;
constexpr double kNoise = 12.0;

constexpr std::array<std::array<int, 3>, 8> kPalette{{
    {70, 110, 60},
    {205, 185, 120},
    {40, 80, 175},
    {150, 150, 150},
    {175, 55, 45},
    {240, 240, 235},
    {100, 60, 140},
    {20, 30, 25},
}};

std::array<int, 3> class_colour(std::size_t c) {
    auto col = kPalette[c % kPalette.size()];
    // Classes past the palette length get a shifted tint.
    const int shift = static_cast<int>(c / kPalette.size()) * 37;
    for (auto &v : col) {
        v = (v + shift) % 256;
    }
    return col;
}

void paint_shape(Image &mask, std::uint8_t cls, Rng &rng) {
    const std::size_t n = mask.width;
    const double s = static_cast<double>(n);
    switch (rng.below(3)) {
    case 0: {  // rectangle
        const auto h = static_cast<std::size_t>(rng.uniform(0.2, 0.5) * s);
        const auto w = static_cast<std::size_t>(rng.uniform(0.2, 0.5) * s);
        const std::size_t y0 = rng.below(n - h + 1);
        const std::size_t x0 = rng.below(n - w + 1);
        for (std::size_t y = y0; y < y0 + h; ++y)
            for (std::size_t x = x0; x < x0 + w; ++x) mask.at(y, x) = cls;
        break;
    }
    case 1: {  // disk
        const double r = rng.uniform(0.12, 0.28) * s;
        const double cy = rng.uniform(0.0, s);
        const double cx = rng.uniform(0.0, s);
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                const double dy = static_cast<double>(y) + 0.5 - cy;
                const double dx = static_cast<double>(x) + 0.5 - cx;
                if (dy * dy + dx * dx <= r * r) mask.at(y, x) = cls;
            }
        break;
    }
    default: {  // stripe bands
        const bool vertical = rng.below(2) == 1;
        const auto period = std::max<std::size_t>(4, static_cast<std::size_t>(rng.uniform(0.2, 0.4) * s));
        const auto band = std::max<std::size_t>(1, period / 2 - rng.below(period / 4 + 1));
        const std::size_t phase = rng.below(period);
        const auto from = static_cast<std::size_t>(rng.uniform(0.0, 0.5) * s);
        const auto to = std::min(n, from + static_cast<std::size_t>(rng.uniform(0.3, 0.6) * s));
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                const std::size_t along = vertical ? x : y;
                const std::size_t across = vertical ? y : x;
                if (across >= from && across < to && (along + phase) % period < band)
                    mask.at(y, x) = cls;
            }
        break;
    }
    }
}

bool shares_ok(const Image &mask, std::size_t classes) {
    std::vector<std::size_t> counts(classes, 0);
    for (const auto v : mask.pixels) ++counts[v];
    const double total = static_cast<double>(mask.pixels.size());
    return std::all_of(counts.begin(), counts.end(), [&](std::size_t c) {
        const double share = static_cast<double>(c) / total;
        return share >= kMinClassShare && share <= kMaxClassShare;
    });
}

} // namespace

SynthSample synth_sample(std::size_t index, std::size_t size, std::size_t classes,
                         std::uint64_t seed) {
    if (classes < 2 || classes > 16) {
        throw ValueError("synth_sample: classes must lie in [2, 16]");
    }
    if (size < 16) {
        throw ValueError("synth_sample: size must be at least 16");
    }
    SynthSample out;
    out.mask = Image{size, size, 1, std::vector<std::uint8_t>(size * size, 0)};
    bool found = false;
    for (std::size_t attempt = 0; attempt < kMaxAttempts && !found; ++attempt) {
        Rng rng(mix_seed({seed, index, attempt}));
        std::fill(out.mask.pixels.begin(), out.mask.pixels.end(), 0);
        for (std::size_t c = 1; c < classes; ++c) {
            const std::size_t shapes = 1 + rng.below(3);
            for (std::size_t k = 0; k < shapes; ++k) {
                paint_shape(out.mask, static_cast<std::uint8_t>(c), rng);
            }
        }
        found = shares_ok(out.mask, classes);
    }
    if (!found) {
        throw DataError("synth_sample: no layout met the class-share bounds for sample " +
                        std::to_string(index));
    }
    Rng noise(mix_seed({seed, index, 0x6e6f697365ULL}));
    out.image = Image{size, size, 3, std::vector<std::uint8_t>(size * size * 3)};
    for (std::size_t y = 0; y < size; ++y) {
        for (std::size_t x = 0; x < size; ++x) {
            const auto col = class_colour(out.mask.at(y, x));
            for (std::size_t c = 0; c < 3; ++c) {
                const double v = col[c] + noise.uniform(-kNoise, kNoise);
                out.image.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            }
        }
    }
    return out;
}

std::vector<SampleRecord> synth_dataset(const std::filesystem::path &out_dir, std::size_t n,
                                        std::size_t size, std::size_t classes,
                                        std::uint64_t seed) {
    if (n == 0) {
        throw ValueError("synth_dataset: need at least one sample");
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "images", ec);
    if (!ec) {
        std::filesystem::create_directories(out_dir / "masks", ec);
    }
    if (ec) {
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }
    std::vector<SampleRecord> records;
    char stem[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(stem, sizeof(stem), "synth_%04zu", i);
        const SynthSample s = synth_sample(i, size, classes, seed);
        SampleRecord rec{stem, out_dir / "images" / (std::string(stem) + ".png"),
                         out_dir / "masks" / (std::string(stem) + ".png"), "train"};
        write_png(rec.image, s.image);
        write_png(rec.mask, s.mask);
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace hqf::train
