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
#include "hqf/tensor/binary_io.hpp"

#include <array>
#include <bit>
#include <cstring>

#include "hqf/tensor/error.hpp"

namespace hqf::binio {

namespace {
constexpr std::uint32_t kMaxRank = 8;
}

void write_u32(std::ostream &out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                static_cast<char>((v >> 16) & 0xff),
                                static_cast<char>((v >> 24) & 0xff)};
    out.write(b.data(), 4);
}

void write_f32(std::ostream &out, float v) { write_u32(out, std::bit_cast<std::uint32_t>(v)); }

void write_magic(std::ostream &out, std::string_view magic) {
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

std::uint32_t read_u32(std::istream &in, const std::string &what) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char *>(b.data()), 4);
    if (in.gcount() != 4) {
        throw IoError("truncated input while reading " + what);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float read_f32(std::istream &in, const std::string &what) {
    return std::bit_cast<float>(read_u32(in, what));
}

void expect_magic(std::istream &in, std::string_view magic, const std::string &source) {
    std::string got(magic.size(), '\0');
    in.read(got.data(), static_cast<std::streamsize>(magic.size()));
    if (static_cast<std::size_t>(in.gcount()) != magic.size() || got != magic) {
        throw IoError(source + ": bad magic, expected \"" + std::string(magic) + "\"");
    }
}

void write_tensor_body(std::ostream &out, const Tensor &t) {
    write_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (const auto d : t.shape()) {
        write_u32(out, static_cast<std::uint32_t>(d));
    }
    for (const double v : t.data()) {
        write_f32(out, static_cast<float>(v));
    }
}

Tensor read_tensor_body(std::istream &in, const std::string &source) {
    const std::uint32_t rank = read_u32(in, source + " rank");
    if (rank == 0 || rank > kMaxRank) {
        throw IoError(source + ": unsupported rank " + std::to_string(rank));
    }
    Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) {
        const std::uint32_t d = read_u32(in, source + " dims");
        if (d == 0) {
            throw IoError(source + ": zero-sized dimension");
        }
        shape.push_back(d);
    }
    Tensor t(shape);
    for (auto &v : t.data()) {
        v = read_f32(in, source + " data");
    }
    return t;
}

Tensor snap_to_f32(const Tensor &t) {
    Tensor out = t;
    for (auto &v : out.data()) {
        v = static_cast<float>(v);
    }
    return out;
}

} // namespace hqf::binio
