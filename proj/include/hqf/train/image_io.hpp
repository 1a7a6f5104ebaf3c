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
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace hqf::train {

/// 8-bit pixels, interleaved, row-major.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;  ///< 3 for RGB, 1 for index masks
    std::vector<std::uint8_t> pixels;

    [[nodiscard]] std::uint8_t at(std::size_t y, std::size_t x, std::size_t c = 0) const {
        return pixels[(y * width + x) * channels + c];
    }
    std::uint8_t &at(std::size_t y, std::size_t x, std::size_t c = 0) {
        return pixels[(y * width + x) * channels + c];
    }
};

/// Any 8/16-bit PNG converted to 8-bit RGB (alpha dropped, gray expanded).
[[nodiscard]] Image read_png_rgb(const std::filesystem::path &path);
/// Gray or palette PNG read as raw 8-bit indices. RGB masks are rejected.
[[nodiscard]] Image read_png_index(const std::filesystem::path &path);
/// Writes 1-channel (gray) or 3-channel (RGB) 8-bit images.
void write_png(const std::filesystem::path &path, const Image &image);

} // namespace hqf::train
