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
/**
 * @file
 * Little-endian framing shared by the checkpoint and feature-file formats:
 * u32 counts, f32 payloads, four-byte magics.
 */
#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "hqf/tensor/tensor.hpp"

namespace hqf::binio {

void write_u32(std::ostream &out, std::uint32_t v);
void write_f32(std::ostream &out, float v);
void write_magic(std::ostream &out, std::string_view magic);

/// Throws IoError on a short read; `what` names the field in the message.
std::uint32_t read_u32(std::istream &in, const std::string &what);
float read_f32(std::istream &in, const std::string &what);
/// Throws IoError when the next four bytes differ from `magic`.
void expect_magic(std::istream &in, std::string_view magic, const std::string &source);

/// rank u32, dims u32..., then f32 row-major data.
void write_tensor_body(std::ostream &out, const Tensor &t);
Tensor read_tensor_body(std::istream &in, const std::string &source);

/// Rounds every element through f32, the precision the files store.
[[nodiscard]] Tensor snap_to_f32(const Tensor &t);

} // namespace hqf::binio
