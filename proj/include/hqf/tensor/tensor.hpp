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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hqf {

using Shape = std::vector<std::size_t>;

[[nodiscard]] std::size_t shape_numel(const Shape &shape);
[[nodiscard]] std::string shape_str(const Shape &shape);

/**
 * @brief Dense row-major N-D array of doubles.
 *
 * Every dimension is positive and `numel() == product(shape)`. Gradients
 * live next to the value in `Var` (see autodiff.hpp), not here.
 */
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> data);

    [[nodiscard]] const Shape &shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
    [[nodiscard]] std::size_t dim(std::size_t axis) const;
    [[nodiscard]] std::size_t numel() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept {
        return data_;
    }
    [[nodiscard]] double *raw() noexcept { return data_.data(); }
    [[nodiscard]] const double *raw() const noexcept { return data_.data(); }

    double &operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    /// Bounds-checked multi-index access.
    double &at(std::initializer_list<std::size_t> index);
    [[nodiscard]] double at(std::initializer_list<std::size_t> index) const;

    /// Same data, new shape with equal element count.
    [[nodiscard]] Tensor reshaped(Shape shape) const;
    void fill(double value) noexcept;
    [[nodiscard]] bool all_finite() const noexcept;

    friend bool operator==(const Tensor &, const Tensor &) = default;

  private:
    [[nodiscard]] std::size_t offset(std::initializer_list<std::size_t> index) const;

    Shape shape_;
    std::vector<double> data_;
};

/// Largest |a - b| over all elements; shapes must agree.
[[nodiscard]] double max_abs_diff(const Tensor &a, const Tensor &b);

} // namespace hqf
