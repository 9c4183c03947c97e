// Copyright 2026 the manuscriptor authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// File: raster.cpp
// Purpose: image container, Perlin noise, geometric transforms

#include "manuscript/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "manuscript/error.hpp"
#include "manuscript/rng.hpp"

namespace manuscript::raster {

Image::Image(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * h * c, fill) {
    if (w < 1 || h < 1 || (c != 1 && c != 3))
        throw validation_error("Image: bad dimensions " + std::to_string(w) + "x" +
                               std::to_string(h) + "x" + std::to_string(c));
}

void NoiseParams::validate() const {
    if (cell_scale <= 0.0)
        throw validation_error("NoiseParams: cell_scale must be > 0");
    if (octaves < 1)
        throw validation_error("NoiseParams: octaves must be >= 1");
    if (persistence <= 0.0 || persistence > 1.0)
        throw validation_error("NoiseParams: persistence must be in (0, 1]");
}

// --- Perlin noise ------------------------------------------------------

PerlinTable::PerlinTable(std::uint64_t seed) {
    std::array<std::uint8_t, 256> p;
    std::iota(p.begin(), p.end(), 0);
    Rng rng(seed);
    for (std::size_t i = p.size(); i > 1; --i)
        std::swap(p[i - 1], p[static_cast<std::size_t>(rng.next_below(i))]);
    for (std::size_t i = 0; i < 512; ++i) perm_[i] = p[i & 255];
}

namespace {

double fade(double t) {
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
}

double lerp(double t, double a, double b) {
    return a + t * (b - a);
}

// Diagonal gradient set: (1,1), (-1,1), (1,-1), (-1,-1).
double grad_dot(std::uint8_t h, double dx, double dy) {
    switch (h & 3) {
        case 0: return dx + dy;
        case 1: return -dx + dy;
        case 2: return dx - dy;
        default: return -dx - dy;
    }
}

} // namespace

double PerlinTable::sample(double x, double y) const {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int xi = static_cast<int>(static_cast<long long>(fx) & 255);
    const int yi = static_cast<int>(static_cast<long long>(fy) & 255);
    const double dx = x - fx;
    const double dy = y - fy;

    const std::uint8_t h00 = perm_[perm_[xi] + yi];
    const std::uint8_t h10 = perm_[perm_[xi + 1] + yi];
    const std::uint8_t h01 = perm_[perm_[xi] + yi + 1];
    const std::uint8_t h11 = perm_[perm_[xi + 1] + yi + 1];

    const double n00 = grad_dot(h00, dx, dy);
    const double n10 = grad_dot(h10, dx - 1.0, dy);
    const double n01 = grad_dot(h01, dx, dy - 1.0);
    const double n11 = grad_dot(h11, dx - 1.0, dy - 1.0);

    const double u = fade(dx);
    const double v = fade(dy);
    // With the length-sqrt(2) diagonal gradients this interpolant peaks at
    // exactly +-1 (cell centers), so no rescaling is needed.
    return lerp(v, lerp(u, n00, n10), lerp(u, n01, n11));
}

double perlin(double x, double y, std::uint64_t seed) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw validation_error("perlin: coordinates must be finite");
    return PerlinTable(seed).sample(x, y);
}

Image perlin_texture(int w, int h, const NoiseParams& p) {
    p.validate();
    if (w < 1 || h < 1)
        throw validation_error("perlin_texture: dimensions must be >= 1");

    std::vector<PerlinTable> tables;
    tables.reserve(static_cast<std::size_t>(p.octaves));
    for (int k = 0; k < p.octaves; ++k)
        tables.emplace_back(derive_seed(p.seed, static_cast<std::uint64_t>(k)));

    Image out(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sum = 0.0;
            double amp = 1.0;
            double scale = p.cell_scale;
            for (int k = 0; k < p.octaves; ++k) {
                sum += amp * tables[static_cast<std::size_t>(k)].sample(x / scale, y / scale);
                amp *= p.persistence;
                scale *= 0.5;
            }
            const double v = p.bias + p.amplitude * sum;
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp<long long>(std::llround(v), 0, 255));
        }
    }
    return out;
}

// --- Geometric transforms ----------------------------------------------

Image resize_height(const Image& img, int target_h, Interp mode) {
    if (target_h < 1)
        throw validation_error("resize_height: target_h must be >= 1");
    const int target_w = std::max(
        1, static_cast<int>(std::llround(static_cast<double>(img.width) * target_h / img.height)));

    Image out(target_w, target_h, img.channels);
    const double sx = static_cast<double>(img.width) / target_w;
    const double sy = static_cast<double>(img.height) / target_h;

    if (mode == Interp::nearest) {
        for (int y = 0; y < target_h; ++y) {
            const int src_y = std::min(img.height - 1, static_cast<int>((y + 0.5) * sy));
            for (int x = 0; x < target_w; ++x) {
                const int src_x = std::min(img.width - 1, static_cast<int>((x + 0.5) * sx));
                for (int c = 0; c < img.channels; ++c)
                    out.at(x, y, c) = img.at(src_x, src_y, c);
            }
        }
        return out;
    }

    for (int y = 0; y < target_h; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < target_w; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < img.channels; ++c) {
                const double top = lerp(wx, img.at(x0, y0, c), img.at(x1, y0, c));
                const double bot = lerp(wx, img.at(x0, y1, c), img.at(x1, y1, c));
                out.at(x, y, c) = static_cast<std::uint8_t>(
                    std::clamp<long long>(std::llround(lerp(wy, top, bot)), 0, 255));
            }
        }
    }
    return out;
}

PadResult pad_right(const Image& img, int target_w, std::uint8_t fill) {
    if (target_w < img.width)
        throw validation_error("pad_right: target_w " + std::to_string(target_w) +
                               " < width " + std::to_string(img.width));
    Image out(target_w, img.height, img.channels, fill);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = img.at(x, y, c);
    return PadResult{std::move(out), img.width};
}

Image blackout_from(const Image& img, int from_x) {
    if (from_x < 0 || from_x > img.width)
        throw validation_error("blackout_from: from_x " + std::to_string(from_x) +
                               " outside [0, " + std::to_string(img.width) + "]");
    Image out = img;
    for (int y = 0; y < out.height; ++y)
        for (int x = from_x; x < out.width; ++x)
            for (int c = 0; c < out.channels; ++c)
                out.at(x, y, c) = 0;
    return out;
}

} // namespace manuscript::raster
