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
#include "hqf/train/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>

#include "hqf/tensor/error.hpp"

namespace hqf::train {

namespace {

struct FileCloser {
    void operator()(std::FILE *f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path &path, const char *mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw IoError(std::string("cannot open ") + path.string() +
                      (mode[0] == 'r' ? " for reading" : " for writing"));
    }
    return f;
}

enum class ReadMode { Rgb, Index };

// libpng reports errors by longjmp; nothing with a destructor may be
// created between setjmp and the calls that can jump.
Image read_png(const std::filesystem::path &path, ReadMode mode) {
    FilePtr file = open_file(path, "rb");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw IoError(path.string() + ": not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) {
        throw IoError("libpng: cannot allocate read struct");
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng: cannot allocate info struct");
    }
    // Heap state: locals changed after setjmp are indeterminate after a jump.
    struct State {
        Image img;
        std::vector<png_bytep> rows;
    };
    const auto state = std::make_unique<State>();
    Image &img = state->img;
    std::vector<png_bytep> &rows = state->rows;
    bool bad_mask = false;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string() + ": corrupt PNG data");
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (mode == ReadMode::Rgb) {
        if (color == PNG_COLOR_TYPE_PALETTE) {
            png_set_palette_to_rgb(png);
        }
        if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
            if (depth < 8) {
                png_set_expand_gray_1_2_4_to_8(png);
            }
            png_set_gray_to_rgb(png);
        }
        if (depth == 16) {
            png_set_strip_16(png);
        }
        png_set_strip_alpha(png);
        img.channels = 3;
    } else {
        if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_PALETTE) {
            bad_mask = true;
        } else if (depth == 16) {
            bad_mask = true;
        } else if (depth < 8) {
            png_set_packing(png);
        }
        img.channels = 1;
    }
    if (bad_mask) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError(path.string() + ": masks must be 8-bit gray or palette PNGs");
    }
    png_read_update_info(png, info);
    img.width = png_get_image_width(png, info);
    img.height = png_get_image_height(png, info);
    if (png_get_rowbytes(png, info) != img.width * img.channels) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string() + ": unexpected PNG row layout");
    }
    img.pixels.resize(img.width * img.height * img.channels);
    rows.resize(img.height);
    for (std::size_t y = 0; y < img.height; ++y) {
        rows[y] = img.pixels.data() + y * img.width * img.channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return std::move(img);
}

} // namespace

Image read_png_rgb(const std::filesystem::path &path) { return read_png(path, ReadMode::Rgb); }

Image read_png_index(const std::filesystem::path &path) {
    return read_png(path, ReadMode::Index);
}

void write_png(const std::filesystem::path &path, const Image &image) {
    if (image.channels != 1 && image.channels != 3) {
        throw ValueError("write_png: only 1- and 3-channel images are supported");
    }
    if (image.pixels.size() != image.width * image.height * image.channels ||
        image.width == 0 || image.height == 0) {
        throw ValueError("write_png: pixel buffer does not match the image size");
    }
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) {
        throw IoError("libpng: cannot allocate write struct");
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng: cannot allocate info struct");
    }
    std::vector<png_bytep> rows(image.height);
    for (std::size_t y = 0; y < image.height; ++y) {
        rows[y] = const_cast<png_bytep>(image.pixels.data() + y * image.width * image.channels);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("write failed for " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8,
                 image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace hqf::train
