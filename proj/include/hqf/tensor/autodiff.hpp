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

#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "hqf/tensor/tensor.hpp"

namespace hqf {

/**
 * @brief A tensor value plus its (lazily allocated) gradient buffer.
 *
 * Copies share the same node, so a Var captured by a backward closure
 * accumulates into the same gradient the caller reads. Constness applies to
 * the handle, not the node it points at.
 */
class Var {
  public:
    Var() = default;
    // NOLINTNEXTLINE(google-explicit-constructor): constants convert freely.
    Var(Tensor value, bool requires_grad = false);

    [[nodiscard]] bool defined() const noexcept { return node_ != nullptr; }
    [[nodiscard]] const Tensor &value() const;
    [[nodiscard]] Tensor &mutable_value() const;
    [[nodiscard]] const Shape &shape() const { return value().shape(); }
    [[nodiscard]] bool requires_grad() const noexcept {
        return node_ && node_->requires_grad;
    }

    [[nodiscard]] bool has_grad() const noexcept {
        return node_ && !node_->grad.empty();
    }
    /// Gradient buffer, zero-initialised on first access.
    Tensor &grad() const;
    void zero_grad() const;
    void clear_grad() const;

    [[nodiscard]] bool same_node(const Var &other) const noexcept {
        return node_ == other.node_;
    }

  private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
    };
    std::shared_ptr<Node> node_;
};

/**
 * @brief Ordered record of executed ops for reverse-mode differentiation.
 *
 * Ops append a backward closure after computing their forward value;
 * `backward()` seeds the root gradient and replays the closures in exact
 * reverse order. A non-recording tape drops every closure, which is what
 * inference uses.
 */
class Tape {
  public:
    explicit Tape(bool recording = true) : recording_(recording) {}

    [[nodiscard]] bool recording() const noexcept { return recording_; }

    /// Wraps an op result; it requires grad iff the tape records and some
    /// input requires grad.
    [[nodiscard]] Var output(Tensor value,
                             std::initializer_list<const Var *> inputs) const;
    [[nodiscard]] Var output(Tensor value, const std::vector<Var> &inputs) const;

    void record(std::function<void()> backward);

    /// Seeds d(root)/d(root) = 1; root must hold a single element.
    void backward(Var &root);
    void backward(Var &root, const Tensor &seed);

    [[nodiscard]] std::size_t size() const noexcept { return ops_.size(); }
    void clear() noexcept { ops_.clear(); }

  private:
    bool recording_;
    std::vector<std::function<void()>> ops_;
};

/// Named trainable variable.
struct NamedParam {
    std::string name;
    Var var;
};

/**
 * @brief Ordered registry of a model's trainable parameters.
 *
 * Registration order is the serialization and optimizer order.
 */
class ParameterSet {
  public:
    /// Creates a trainable Var and registers it under `name`.
    Var add(const std::string &name, Tensor init);

    [[nodiscard]] const std::vector<NamedParam> &items() const noexcept {
        return items_;
    }
    std::vector<NamedParam> &items() noexcept { return items_; }
    [[nodiscard]] std::size_t scalar_count() const;
    [[nodiscard]] const NamedParam *find(const std::string &name) const;
    void zero_grad();

  private:
    std::vector<NamedParam> items_;
};

} // namespace hqf
