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
#include "hqf/tensor/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "hqf/tensor/error.hpp"

namespace hqf {

std::size_t shape_numel(const Shape &shape) {
    std::size_t n = 1;
    for (const auto d : shape) {
        n *= d;
    }
    return n;
}

std::string shape_str(const Shape &shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i != 0) {
            out += ",";
        }
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

namespace {
void check_dims(const Shape &shape) {
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (shape[i] == 0) {
            throw DimensionError("Tensor", "axis " + std::to_string(i),
                                 "dimension sizes must be positive");
        }
    }
}
} // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {
    check_dims(shape_);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    check_dims(shape_);
    if (data_.size() != shape_numel(shape_)) {
        throw DimensionError("Tensor", "data", shape_numel(shape_),
                             data_.size());
    }
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw DimensionError("Tensor::dim", "axis " + std::to_string(axis),
                             "rank is " + std::to_string(shape_.size()));
    }
    return shape_[axis];
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
    if (index.size() != shape_.size()) {
        throw DimensionError("Tensor::at", "rank", shape_.size(),
                             index.size());
    }
    std::size_t off = 0;
    std::size_t axis = 0;
    for (const auto i : index) {
        if (i >= shape_[axis]) {
            throw DimensionError("Tensor::at", "axis " + std::to_string(axis),
                                 "index " + std::to_string(i) +
                                     " out of range");
        }
        off = off * shape_[axis] + i;
        ++axis;
    }
    return off;
}

double &Tensor::at(std::initializer_list<std::size_t> index) {
    return data_[offset(index)];
}

double Tensor::at(std::initializer_list<std::size_t> index) const {
    return data_[offset(index)];
}

Tensor Tensor::reshaped(Shape shape) const {
    if (shape_numel(shape) != data_.size()) {
        throw DimensionError("Tensor::reshaped", "numel", data_.size(),
                             shape_numel(shape));
    }
    return Tensor(std::move(shape), data_);
}

void Tensor::fill(double value) noexcept {
    std::fill(data_.begin(), data_.end(), value);
}

bool Tensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

double max_abs_diff(const Tensor &a, const Tensor &b) {
    if (a.shape() != b.shape()) {
        throw DimensionError("max_abs_diff", "shape",
                             shape_str(a.shape()) + " vs " +
                                 shape_str(b.shape()));
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

} // namespace hqf
