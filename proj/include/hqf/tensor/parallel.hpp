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
#include <functional>

namespace hqf {

/// Worker cap: HQF_THREADS if set and positive, else hardware concurrency.
[[nodiscard]] std::size_t worker_count();

/**
 * Runs `body(i)` for i in [0, n). Items are split into contiguous chunks,
 * one per worker. Each item must write only to storage it owns, so results
 * never depend on the worker count.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

} // namespace hqf
