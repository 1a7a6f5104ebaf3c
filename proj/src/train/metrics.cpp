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
#include "hqf/train/metrics.hpp"

#include <limits>
#include <numeric>
#include <optional>

#include "hqf/tensor/error.hpp"

namespace hqf::train {

namespace {

using U128 = unsigned __int128;

U128 gcd128(U128 a, U128 b) {
    while (b != 0) {
        const U128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// a/b + c/d, reduced; nullopt on overflow.
std::optional<std::pair<U128, U128>> add_fraction(std::pair<U128, U128> x, U128 c, U128 d) {
    U128 n1 = 0, n2 = 0, den = 0, num = 0;
    if (__builtin_mul_overflow(x.first, d, &n1) || __builtin_mul_overflow(c, x.second, &n2) ||
        __builtin_mul_overflow(x.second, d, &den) || __builtin_add_overflow(n1, n2, &num)) {
        return std::nullopt;
    }
    const U128 g = gcd128(num, den);
    return std::pair{num / g, den / g};
}

} // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes)
    : n_(n_classes), counts_(n_classes * n_classes, 0) {
    if (n_classes == 0) {
        throw ValueError("ConfusionMatrix: need at least one class");
    }
}

void ConfusionMatrix::add(const LabelMap &truth, const LabelMap &predicted) {
    if (truth.labels.size() != predicted.labels.size() || truth.height != predicted.height ||
        truth.width != predicted.width) {
        throw DataError("ConfusionMatrix::add: truth and prediction layouts differ");
    }
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        const auto t = truth.labels[i];
        if (t == kIgnoreLabel) {
            continue;
        }
        const auto p = predicted.labels[i];
        if (t >= n_ || p >= n_) {
            throw DataError("ConfusionMatrix::add: class id " + std::to_string(t >= n_ ? t : p) +
                            " out of range for " + std::to_string(n_) + " classes");
        }
        ++counts_[t * n_ + p];
    }
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t s = 0;
    for (const auto c : counts_) {
        s += c;
    }
    return s;
}

void ConfusionMatrix::merge(const ConfusionMatrix &other) {
    if (other.n_ != n_) {
        throw ValueError("ConfusionMatrix::merge: class counts differ");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
    }
}

Metrics compute_metrics(const ConfusionMatrix &cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) {
        throw DataError("compute_metrics: confusion matrix is empty");
    }
    const std::size_t n = cm.classes();
    Metrics out;
    out.iou.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::uint64_t trace = 0;
    long double sum = 0.0L;
    std::optional<std::pair<U128, U128>> exact = std::pair<U128, U128>{0, 1};
    for (std::size_t c = 0; c < n; ++c) {
        const std::uint64_t tp = cm.count(c, c);
        std::uint64_t row = 0;
        std::uint64_t col = 0;
        for (std::size_t k = 0; k < n; ++k) {
            row += cm.count(c, k);
            col += cm.count(k, c);
        }
        trace += tp;
        const std::uint64_t uni = row + col - tp;
        if (uni == 0) {
            continue;
        }
        out.iou[c] = static_cast<double>(tp) / static_cast<double>(uni);
        sum += static_cast<long double>(tp) / static_cast<long double>(uni);
        if (exact) {
            exact = add_fraction(*exact, tp, uni);
        }
        ++out.present;
    }
    out.miou = static_cast<double>(sum / static_cast<long double>(out.present));
    if (exact) {
        U128 den = 0;
        if (!__builtin_mul_overflow(exact->second, static_cast<U128>(out.present), &den)) {
            const U128 g = gcd128(exact->first, den);
            const U128 num = exact->first / g;
            den /= g;
            constexpr U128 kMax = std::numeric_limits<std::uint64_t>::max();
            if (num <= kMax && den <= kMax) {
                out.miou_num = static_cast<std::uint64_t>(num);
                out.miou_den = static_cast<std::uint64_t>(den);
                out.miou = static_cast<double>(static_cast<long double>(out.miou_num) /
                                               static_cast<long double>(out.miou_den));
            }
        }
    }
    out.oa = static_cast<double>(trace) / static_cast<double>(total);
    return out;
}

} // namespace hqf::train
