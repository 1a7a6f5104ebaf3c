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
#include "hqf/train/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hqf/tensor/error.hpp"
#include "hqf/tensor/random.hpp"

namespace hqf::train {

namespace {

constexpr std::uint64_t kOrderSalt = 0x6f72646572ULL;
constexpr std::uint64_t kCropSalt = 0x63726f70ULL;

std::map<std::string, std::filesystem::path> png_files(const std::filesystem::path &dir) {
    std::map<std::string, std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) {
        throw DataError("missing directory " + dir.string());
    }
    for (const auto &entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            out.emplace(entry.path().stem().string(), entry.path());
        }
    }
    return out;
}

std::string join_lines(const std::vector<std::string> &items) {
    std::string out;
    for (const auto &s : items) {
        out += "\n  " + s;
    }
    return out;
}

} // namespace

std::vector<SampleRecord> scan_dataset(const std::filesystem::path &root) {
    const auto images = png_files(root / "images");
    const auto masks = png_files(root / "masks");
    std::vector<SampleRecord> out;
    std::vector<std::string> problems;
    for (const auto &[stem, path] : images) {
        const auto it = masks.find(stem);
        if (it == masks.end()) {
            problems.push_back(path.string() + ": no mask");
            continue;
        }
        out.push_back({stem, path, it->second, "train"});
    }
    for (const auto &[stem, path] : masks) {
        if (!images.contains(stem)) {
            problems.push_back(path.string() + ": no image");
        }
    }
    if (!problems.empty()) {
        throw DataError("unpaired files under " + root.string() + ":" + join_lines(problems));
    }
    if (out.empty()) {
        throw DataError("no samples under " + root.string());
    }
    return out;
}

Dataset::Dataset(std::vector<Sample> samples, std::size_t classes)
    : samples_(std::move(samples)), classes_(classes) {
    if (samples_.empty()) {
        throw DataError("dataset is empty");
    }
}

Dataset Dataset::load(const std::filesystem::path &root, std::size_t classes) {
    std::vector<Sample> samples;
    std::vector<std::string> problems;
    for (const auto &rec : scan_dataset(root)) {
        Sample s{rec.stem, read_png_rgb(rec.image), read_png_index(rec.mask)};
        if (s.image.width != s.mask.width || s.image.height != s.mask.height) {
            problems.push_back(rec.stem + ": image " + std::to_string(s.image.width) + "x" +
                               std::to_string(s.image.height) + " vs mask " +
                               std::to_string(s.mask.width) + "x" +
                               std::to_string(s.mask.height));
            continue;
        }
        const auto bad = std::find_if(s.mask.pixels.begin(), s.mask.pixels.end(), [&](auto v) {
            return v >= classes && v != kIgnoreLabel;
        });
        if (bad != s.mask.pixels.end()) {
            problems.push_back(rec.mask.string() + ": class id " + std::to_string(*bad) +
                               " >= " + std::to_string(classes));
            continue;
        }
        samples.push_back(std::move(s));
    }
    if (!problems.empty()) {
        throw DataError("invalid samples under " + root.string() + ":" + join_lines(problems));
    }
    return Dataset(std::move(samples), classes);
}

CropOrigin random_crop_origin(const Sample &s, std::size_t size, std::uint64_t seed,
                              std::size_t epoch, std::size_t index) {
    if (s.image.height < size || s.image.width < size) {
        throw DataError(s.id + ": image smaller than the crop size " + std::to_string(size));
    }
    Rng rng(mix_seed({seed, kCropSalt, epoch, index}));
    CropOrigin o;
    o.y = rng.below(s.image.height - size + 1);
    o.x = rng.below(s.image.width - size + 1);
    return o;
}

CropOrigin center_crop_origin(const Sample &s, std::size_t size) {
    if (s.image.height < size || s.image.width < size) {
        throw DataError(s.id + ": image smaller than the crop size " + std::to_string(size));
    }
    return {(s.image.height - size) / 2, (s.image.width - size) / 2};
}

void fill_slot(Batch &batch, std::size_t slot, const Sample &s, std::size_t size,
               SampleMode mode, CropOrigin origin) {
    const std::size_t plane = size * size;
    double *img = batch.images.raw() + slot * 3 * plane;
    std::uint8_t *mask = batch.masks.labels.data() + slot * plane;
    batch.ids[slot] = s.id;
    constexpr double kScale = 255.0;
    if (mode == SampleMode::Crop) {
        for (std::size_t y = 0; y < size; ++y) {
            for (std::size_t x = 0; x < size; ++x) {
                for (std::size_t c = 0; c < 3; ++c) {
                    img[c * plane + y * size + x] =
                        s.image.at(origin.y + y, origin.x + x, c) / kScale;
                }
                mask[y * size + x] = s.mask.at(origin.y + y, origin.x + x);
            }
        }
        return;
    }
    const double sy = static_cast<double>(s.image.height) / static_cast<double>(size);
    const double sx = static_cast<double>(s.image.width) / static_cast<double>(size);
    const auto source = [](std::size_t i, double scale, std::size_t extent) {
        const double f = std::clamp((static_cast<double>(i) + 0.5) * scale - 0.5, 0.0,
                                    static_cast<double>(extent - 1));
        const auto lo = static_cast<std::size_t>(f);
        return std::pair{lo, f - static_cast<double>(lo)};
    };
    for (std::size_t y = 0; y < size; ++y) {
        const auto [y0, fy] = source(y, sy, s.image.height);
        const std::size_t y1 = std::min(y0 + 1, s.image.height - 1);
        const auto ny = std::min(static_cast<std::size_t>((static_cast<double>(y) + 0.5) * sy),
                                 s.mask.height - 1);
        for (std::size_t x = 0; x < size; ++x) {
            const auto [x0, fx] = source(x, sx, s.image.width);
            const std::size_t x1 = std::min(x0 + 1, s.image.width - 1);
            for (std::size_t c = 0; c < 3; ++c) {
                const double top = (1 - fx) * s.image.at(y0, x0, c) + fx * s.image.at(y0, x1, c);
                const double bot = (1 - fx) * s.image.at(y1, x0, c) + fx * s.image.at(y1, x1, c);
                img[c * plane + y * size + x] = ((1 - fy) * top + fy * bot) / kScale;
            }
            const auto nx = std::min(static_cast<std::size_t>((static_cast<double>(x) + 0.5) * sx),
                                     s.mask.width - 1);
            mask[y * size + x] = s.mask.at(ny, nx);
        }
    }
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    Rng rng(mix_seed({seed, kOrderSalt, epoch}));
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
    return order;
}

namespace {

Batch empty_batch(std::size_t n, std::size_t size) {
    Batch b;
    b.images = Tensor({n, 3, size, size});
    b.masks = LabelMap(n, size, size);
    b.ids.resize(n);
    return b;
}

} // namespace

Batch eval_batch(const Dataset &data, std::span<const std::size_t> indices, std::size_t size,
                 SampleMode mode) {
    Batch b = empty_batch(indices.size(), size);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        const Sample &s = data[indices[k]];
        const CropOrigin o = mode == SampleMode::Crop ? center_crop_origin(s, size) : CropOrigin{};
        fill_slot(b, k, s, size, mode, o);
    }
    return b;
}

BatchStream::BatchStream(const Dataset &data, std::size_t batch, std::size_t size,
                         SampleMode mode, std::uint64_t seed)
    : data_(data), batch_(batch), size_(size), mode_(mode), seed_(seed) {
    if (batch == 0) {
        throw ConfigError("batch size must be at least 1");
    }
    order_ = epoch_order(data_.size(), seed_, epoch_);
}

Batch BatchStream::next() {
    const std::size_t n = std::min(batch_, order_.size() - pos_);
    Batch b = empty_batch(n, size_);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = order_[pos_ + k];
        const Sample &s = data_[idx];
        const CropOrigin o = mode_ == SampleMode::Crop
                                 ? random_crop_origin(s, size_, seed_, epoch_, idx)
                                 : CropOrigin{};
        fill_slot(b, k, s, size_, mode_, o);
    }
    pos_ += n;
    if (pos_ == order_.size()) {
        ++epoch_;
        pos_ = 0;
        order_ = epoch_order(data_.size(), seed_, epoch_);
    }
    return b;
}

} // namespace hqf::train
