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
#include "hqf/segnet/provider.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "hqf/tensor/binary_io.hpp"
#include "hqf/tensor/error.hpp"
#include "hqf/tensor/random.hpp"
#include "json.hpp"

namespace hqf::segnet {

namespace {

constexpr std::string_view kFeatureMagic = "HQFT";

struct Wave {
    double amplitude;
    double fx;
    double fy;
    double phase;
};

} // namespace

Tensor SyntheticProvider::features(const std::string &sample_id, std::size_t level,
                                   const FeatureGeometry &expected) const {
    if (expected.channels == 0 || expected.height == 0 || expected.width == 0) {
        throw DataError("synthetic features: empty geometry for level " + std::to_string(level));
    }
    Rng rng(mix_seed({seed_, fnv1a(sample_id), level}));
    const double two_pi = 2.0 * std::numbers::pi;
    const double amp = 1.0 / std::sqrt(static_cast<double>(kTerms));
    const std::size_t h = expected.height;
    const std::size_t w = expected.width;

    Tensor out(expected.shape());
    double *o = out.raw();
    std::vector<double> cx(w);
    std::vector<double> cy(h);
    for (std::size_t c = 0; c < expected.channels; ++c) {
        double *plane = o + c * h * w;
        for (std::size_t m = 0; m < kTerms; ++m) {
            const Wave wave{amp * rng.normal(),
                            static_cast<double>(rng.below(kMaxFrequency + 1)),
                            static_cast<double>(rng.below(kMaxFrequency + 1)),
                            two_pi * rng.uniform()};
            for (std::size_t y = 0; y < h; ++y) {
                for (std::size_t x = 0; x < w; ++x) {
                    const double arg = two_pi * (wave.fx * (static_cast<double>(x) + 0.5) /
                                                     static_cast<double>(w) +
                                                 wave.fy * (static_cast<double>(y) + 0.5) /
                                                     static_cast<double>(h)) +
                                       wave.phase;
                    plane[y * w + x] += wave.amplitude * std::cos(arg);
                }
            }
        }
    }
    return out;
}

FileProvider::FileProvider(const std::filesystem::path &manifest) {
    std::ifstream in(manifest);
    if (!in) {
        throw IoError("cannot open feature manifest " + manifest.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw DataError("feature manifest " + manifest.string() + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw DataError("feature manifest " + manifest.string() + ": top level must be an object");
    }
    const auto base = manifest.parent_path();
    for (const auto &[id, stages] : doc.items()) {
        if (!stages.is_object()) {
            throw DataError("feature manifest: entry \"" + id + "\" must map levels to paths");
        }
        auto &slot = entries_[id];
        for (const auto &[level, path] : stages.items()) {
            std::size_t parsed = 0;
            try {
                std::size_t used = 0;
                parsed = std::stoul(level, &used);
                if (used != level.size()) {
                    throw std::invalid_argument(level);
                }
            } catch (const std::exception &) {
                throw DataError("feature manifest: entry \"" + id + "\" has non-numeric level \"" +
                                level + "\"");
            }
            if (!path.is_string()) {
                throw DataError("feature manifest: entry \"" + id + "\" level " + level +
                                " is not a path");
            }
            std::filesystem::path p = path.get<std::string>();
            slot[parsed] = p.is_absolute() ? p : base / p;
        }
    }
}

Tensor FileProvider::features(const std::string &sample_id, std::size_t level,
                              const FeatureGeometry &expected) const {
    const auto it = entries_.find(sample_id);
    if (it == entries_.end()) {
        throw DataError("feature manifest has no entry for sample \"" + sample_id + "\"");
    }
    const auto jt = it->second.find(level);
    if (jt == it->second.end()) {
        throw DataError("feature manifest entry \"" + sample_id + "\" lacks level " +
                        std::to_string(level));
    }
    Tensor t = read_feature_file(jt->second);
    if (t.shape() != expected.shape()) {
        throw DataError(jt->second.string() + ": shape " + shape_str(t.shape()) +
                        " differs from expected " + shape_str(expected.shape()));
    }
    return t;
}

void write_feature_file(const std::filesystem::path &path, const Tensor &t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write feature file " + path.string());
    }
    binio::write_magic(out, kFeatureMagic);
    binio::write_tensor_body(out, t);
    if (!out) {
        throw IoError("write failed for feature file " + path.string());
    }
}

Tensor read_feature_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open feature file " + path.string());
    }
    binio::expect_magic(in, kFeatureMagic, path.string());
    Tensor t = binio::read_tensor_body(in, path.string());
    if (in.peek() != std::char_traits<char>::eof()) {
        throw IoError(path.string() + ": trailing bytes after tensor data");
    }
    return t;
}

} // namespace hqf::segnet
