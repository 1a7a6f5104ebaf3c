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
#include "hqf/tensor/autodiff.hpp"

#include <algorithm>

#include "hqf/tensor/error.hpp"

namespace hqf {

Var::Var(Tensor value, bool requires_grad)
    : node_(std::make_shared<Node>()) {
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
}

const Tensor &Var::value() const {
    if (!node_) {
        throw ValueError("Var::value: undefined variable");
    }
    return node_->value;
}

Tensor &Var::mutable_value() const {
    if (!node_) {
        throw ValueError("Var::mutable_value: undefined variable");
    }
    return node_->value;
}

Tensor &Var::grad() const {
    if (!node_) {
        throw ValueError("Var::grad: undefined variable");
    }
    if (node_->grad.empty()) {
        node_->grad = Tensor(node_->value.shape(), 0.0);
    }
    return node_->grad;
}

void Var::zero_grad() const {
    if (node_ && !node_->grad.empty()) {
        node_->grad.fill(0.0);
    }
}

void Var::clear_grad() const {
    if (node_) {
        node_->grad = Tensor();
    }
}

Var Tape::output(Tensor value, std::initializer_list<const Var *> inputs) const {
    const bool needs = recording_ &&
                       std::any_of(inputs.begin(), inputs.end(),
                                   [](const Var *v) { return v->requires_grad(); });
    return Var(std::move(value), needs);
}

Var Tape::output(Tensor value, const std::vector<Var> &inputs) const {
    const bool needs = recording_ &&
                       std::any_of(inputs.begin(), inputs.end(),
                                   [](const Var &v) { return v.requires_grad(); });
    return Var(std::move(value), needs);
}

void Tape::record(std::function<void()> backward) {
    if (recording_) {
        ops_.push_back(std::move(backward));
    }
}

void Tape::backward(Var &root) {
    if (root.value().numel() != 1) {
        throw DimensionError("Tape::backward", "root", 1, root.value().numel());
    }
    backward(root, Tensor(root.shape(), 1.0));
}

void Tape::backward(Var &root, const Tensor &seed) {
    if (seed.shape() != root.shape()) {
        throw DimensionError("Tape::backward", "seed",
                             shape_str(root.shape()) + " vs " +
                                 shape_str(seed.shape()));
    }
    Tensor &g = root.grad();
    for (std::size_t i = 0; i < g.numel(); ++i) {
        g[i] += seed[i];
    }
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
        (*it)();
    }
}

Var ParameterSet::add(const std::string &name, Tensor init) {
    if (find(name) != nullptr) {
        throw ValueError("ParameterSet: duplicate parameter name '" + name + "'");
    }
    Var v(std::move(init), true);
    items_.push_back({name, v});
    return v;
}

std::size_t ParameterSet::scalar_count() const {
    std::size_t n = 0;
    for (const auto &p : items_) {
        n += p.var.value().numel();
    }
    return n;
}

const NamedParam *ParameterSet::find(const std::string &name) const {
    const auto it = std::find_if(items_.begin(), items_.end(),
                                 [&](const NamedParam &p) { return p.name == name; });
    return it == items_.end() ? nullptr : &*it;
}

void ParameterSet::zero_grad() {
    for (auto &p : items_) {
        p.var.zero_grad();
    }
}

} // namespace hqf
