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

#include <cmath>
#include <cstddef>

namespace hqf::bilinear {

/// Normalized [-1,1] coordinate -> continuous pixel index (centres at i).
inline double to_pixel(double u, std::size_t extent) noexcept {
    return ((u + 1.0) * static_cast<double>(extent) - 1.0) * 0.5;
}

/// d(to_pixel)/du.
inline double pixel_scale(std::size_t extent) noexcept {
    return 0.5 * static_cast<double>(extent);
}

/// Four-neighbour sampling point with zero padding outside the plane.
struct Tap {
    long x0 = 0;
    long y0 = 0;
    double fx = 0.0;
    double fy = 0.0;

    Tap(double px, double py) noexcept {
        const double fx0 = std::floor(px);
        const double fy0 = std::floor(py);
        x0 = static_cast<long>(fx0);
        y0 = static_cast<long>(fy0);
        fx = px - fx0;
        fy = py - fy0;
    }

    static bool inside(long x, long y, std::size_t h, std::size_t w) noexcept {
        return x >= 0 && y >= 0 && x < static_cast<long>(w) &&
               y < static_cast<long>(h);
    }

    static double fetch(const double *plane, long x, long y, std::size_t h,
                        std::size_t w) noexcept {
        return inside(x, y, h, w) ? plane[static_cast<std::size_t>(y) * w +
                                          static_cast<std::size_t>(x)]
                                  : 0.0;
    }

    [[nodiscard]] double sample(const double *plane, std::size_t h,
                                std::size_t w) const noexcept {
        const double v00 = fetch(plane, x0, y0, h, w);
        const double v01 = fetch(plane, x0 + 1, y0, h, w);
        const double v10 = fetch(plane, x0, y0 + 1, h, w);
        const double v11 = fetch(plane, x0 + 1, y0 + 1, h, w);
        return (1 - fy) * ((1 - fx) * v00 + fx * v01) +
               fy * ((1 - fx) * v10 + fx * v11);
    }

    /// Scatters `g` into the plane gradient and returns d(sample)/d(px, py)
    /// scaled by g through the out-parameters.
    void backward(const double *plane, double *dplane, std::size_t h,
                  std::size_t w, double g, double &dpx,
                  double &dpy) const noexcept {
        const long xs[4] = {x0, x0 + 1, x0, x0 + 1};
        const long ys[4] = {y0, y0, y0 + 1, y0 + 1};
        const double ws[4] = {(1 - fy) * (1 - fx), (1 - fy) * fx,
                              fy * (1 - fx), fy * fx};
        double v[4];
        for (int i = 0; i < 4; ++i) {
            v[i] = fetch(plane, xs[i], ys[i], h, w);
            if (dplane != nullptr && inside(xs[i], ys[i], h, w)) {
                dplane[static_cast<std::size_t>(ys[i]) * w +
                       static_cast<std::size_t>(xs[i])] += g * ws[i];
            }
        }
        dpx += g * ((1 - fy) * (v[1] - v[0]) + fy * (v[3] - v[2]));
        dpy += g * ((1 - fx) * (v[2] - v[0]) + fx * (v[3] - v[1]));
    }
};

} // namespace hqf::bilinear
