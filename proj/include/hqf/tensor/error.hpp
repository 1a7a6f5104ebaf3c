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
#include <stdexcept>
#include <string>

namespace hqf {

/**
 * @brief Base of every error raised by the toolkit.
 *
 * `category()` is a short machine-parseable token ("shape", "value",
 * "numeric", "io", "config", "data", "usage") that the CLI prints in its
 * one-line error report.
 */
class Error : public std::runtime_error {
  public:
    Error(std::string category, const std::string &message)
        : std::runtime_error(message), category_(std::move(category)) {}

    [[nodiscard]] const std::string &category() const noexcept {
        return category_;
    }

  private:
    std::string category_;
};

/// Shape mismatch. The message always names the operation and the axis.
class DimensionError : public Error {
  public:
    DimensionError(const std::string &op, const std::string &axis,
                   std::size_t expected, std::size_t actual)
        : Error("shape", op + ": dimension mismatch on axis '" + axis +
                             "' (expected " + std::to_string(expected) +
                             ", got " + std::to_string(actual) + ")"),
          axis_(axis) {}

    DimensionError(const std::string &op, const std::string &axis,
                   const std::string &detail)
        : Error("shape", op + ": invalid axis '" + axis + "': " + detail),
          axis_(axis) {}

    [[nodiscard]] const std::string &axis() const noexcept { return axis_; }

  private:
    std::string axis_;
};

class ValueError : public Error {
  public:
    explicit ValueError(const std::string &message) : Error("value", message) {}
};

class NumericError : public Error {
  public:
    explicit NumericError(const std::string &message)
        : Error("numeric", message) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string &message) : Error("io", message) {}
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string &message)
        : Error("config", message) {}
};

class DataError : public Error {
  public:
    explicit DataError(const std::string &message) : Error("data", message) {}
};

} // namespace hqf
