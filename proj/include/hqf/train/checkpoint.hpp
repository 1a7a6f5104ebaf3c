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

#include <filesystem>

#include "hqf/tensor/autodiff.hpp"

namespace hqf::train {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/**
 * "HQFC", version u32, then per parameter: name length u32, UTF-8 name,
 * rank u32, dims u32, f32 data. Little-endian throughout.
 */
void save_checkpoint(const std::filesystem::path &path, const ParameterSet &params);

/// Loads into an existing set. Every parameter must appear exactly once
/// with a matching shape; anything else is a DataError.
void load_checkpoint(const std::filesystem::path &path, ParameterSet &params);

/// Rounds every parameter to f32 so in-memory weights equal saved ones.
void snap_to_checkpoint_precision(ParameterSet &params);

} // namespace hqf::train
