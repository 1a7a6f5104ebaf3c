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
#include "hqf/train/checkpoint.hpp"

#include <fstream>
#include <map>

#include "hqf/tensor/binary_io.hpp"
#include "hqf/tensor/error.hpp"

namespace hqf::train {

namespace {
constexpr std::string_view kMagic = "HQFC";
constexpr std::uint32_t kMaxName = 4096;
} // namespace

void save_checkpoint(const std::filesystem::path &path, const ParameterSet &params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write checkpoint " + path.string());
    }
    binio::write_magic(out, kMagic);
    binio::write_u32(out, kCheckpointVersion);
    for (const auto &item : params.items()) {
        binio::write_u32(out, static_cast<std::uint32_t>(item.name.size()));
        out.write(item.name.data(), static_cast<std::streamsize>(item.name.size()));
        binio::write_tensor_body(out, item.var.value());
    }
    if (!out) {
        throw IoError("write failed for checkpoint " + path.string());
    }
}

void load_checkpoint(const std::filesystem::path &path, ParameterSet &params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint " + path.string());
    }
    const std::string src = path.string();
    binio::expect_magic(in, kMagic, src);
    const std::uint32_t version = binio::read_u32(in, src + " version");
    if (version != kCheckpointVersion) {
        throw IoError(src + ": unsupported checkpoint version " + std::to_string(version));
    }
    std::map<std::string, Tensor> blobs;
    while (in.peek() != std::char_traits<char>::eof()) {
        const std::uint32_t len = binio::read_u32(in, src + " name length");
        if (len == 0 || len > kMaxName) {
            throw IoError(src + ": bad parameter name length " + std::to_string(len));
        }
        std::string name(len, '\0');
        in.read(name.data(), len);
        if (static_cast<std::uint32_t>(in.gcount()) != len) {
            throw IoError(src + ": truncated parameter name");
        }
        Tensor t = binio::read_tensor_body(in, src + " [" + name + "]");
        if (!blobs.emplace(name, std::move(t)).second) {
            throw DataError(src + ": parameter \"" + name + "\" appears twice");
        }
    }
    for (const auto &item : params.items()) {
        const auto it = blobs.find(item.name);
        if (it == blobs.end()) {
            throw DataError(src + ": missing parameter \"" + item.name + "\"");
        }
        if (it->second.shape() != item.var.shape()) {
            throw DataError(src + ": parameter \"" + item.name + "\" has shape " +
                            shape_str(it->second.shape()) + ", network expects " +
                            shape_str(item.var.shape()));
        }
    }
    if (blobs.size() != params.items().size()) {
        for (const auto &[name, t] : blobs) {
            if (params.find(name) == nullptr) {
                throw DataError(src + ": unknown parameter \"" + name + "\"");
            }
        }
    }
    for (auto &item : params.items()) {
        item.var.mutable_value() = std::move(blobs.at(item.name));
    }
}

void snap_to_checkpoint_precision(ParameterSet &params) {
    for (auto &item : params.items()) {
        item.var.mutable_value() = binio::snap_to_f32(item.var.value());
    }
}

} // namespace hqf::train
