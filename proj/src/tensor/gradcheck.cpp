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
#include "hqf/tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hqf/tensor/error.hpp"
#include "hqf/tensor/random.hpp"

namespace hqf {

namespace {
double finite_or_throw(double v) {
    if (!std::isfinite(v)) {
        throw NumericError("finite_diff_check: objective is not finite");
    }
    return v;
}

std::vector<std::size_t> all_indices(std::size_t n,
                                     std::span<const std::size_t> indices) {
    if (!indices.empty()) {
        return {indices.begin(), indices.end()};
    }
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}
} // namespace

std::vector<double> central_difference(const ScalarFn &f,
                                       std::span<const double> theta, double h,
                                       std::span<const std::size_t> indices) {
    std::vector<double> point(theta.begin(), theta.end());
    const auto idx = all_indices(theta.size(), indices);
    std::vector<double> out;
    out.reserve(idx.size());
    for (const auto i : idx) {
        if (i >= point.size()) {
            throw ValueError("central_difference: index out of range");
        }
        const double orig = point[i];
        point[i] = orig + h;
        const double fp = finite_or_throw(f(point));
        point[i] = orig - h;
        const double fm = finite_or_throw(f(point));
        point[i] = orig;
        out.push_back((fp - fm) / (2.0 * h));
    }
    return out;
}

FiniteDiffReport finite_diff_check(const ScalarFn &f,
                                   std::span<const double> theta,
                                   std::span<const double> analytic, double h,
                                   std::span<const std::size_t> indices) {
    if (analytic.size() != theta.size()) {
        throw ValueError("finite_diff_check: gradient length differs from theta");
    }
    FiniteDiffReport report;
    report.indices = all_indices(theta.size(), indices);
    report.numeric = central_difference(f, theta, h, report.indices);
    for (std::size_t j = 0; j < report.indices.size(); ++j) {
        const double num = report.numeric[j];
        const double err = std::abs(analytic[report.indices[j]] - num) /
                           std::max(1.0, std::abs(num));
        if (j == 0 || err > report.max_rel_error) {
            report.max_rel_error = err;
            report.worst_index = report.indices[j];
        }
    }
    return report;
}

double check_graph_gradients(const ScalarGraph &graph,
                             const std::vector<Var> &inputs,
                             const GraphCheckOptions &options) {
    for (Var in : inputs) {
        in.clear_grad();
    }
    Tape tape(true);
    Var out = graph(tape, inputs);
    if (out.value().numel() != 1) {
        throw ValueError("check_graph_gradients: graph must return a scalar");
    }
    finite_or_throw(out.value()[0]);
    tape.backward(out);

    // (input, element) pairs that take part in the check.
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (!inputs[k].requires_grad()) {
            continue;
        }
        for (std::size_t i = 0; i < inputs[k].value().numel(); ++i) {
            coords.emplace_back(k, i);
        }
    }
    if (options.max_coords != 0 && coords.size() > options.max_coords) {
        Rng rng(mix_seed({options.seed, 0x67726164ULL}));
        for (std::size_t i = 0; i < options.max_coords; ++i) {
            const auto j = i + rng.below(coords.size() - i);
            std::swap(coords[i], coords[j]);
        }
        coords.resize(options.max_coords);
    }

    const auto evaluate = [&] {
        Tape probe(false);
        return finite_or_throw(graph(probe, inputs).value()[0]);
    };
    double worst = 0.0;
    for (const auto &[k, i] : coords) {
        Var in = inputs[k];
        const double analytic = in.has_grad() ? in.grad()[i] : 0.0;
        double &slot = in.mutable_value()[i];
        const double orig = slot;
        slot = orig + options.h;
        const double fp = evaluate();
        slot = orig - options.h;
        const double fm = evaluate();
        slot = orig;
        const double numeric = (fp - fm) / (2.0 * options.h);
        worst = std::max(worst, std::abs(analytic - numeric) /
                                    std::max(1.0, std::abs(numeric)));
    }
    return worst;
}

} // namespace hqf
