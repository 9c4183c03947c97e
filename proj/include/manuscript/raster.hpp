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
// File: raster.hpp
// Purpose: image container, PNG I/O, Perlin noise, geometric transforms

#ifndef MANUSCRIPT_RASTER_HPP
#define MANUSCRIPT_RASTER_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace manuscript::raster {

// 8-bit raster, grayscale (channels == 1) or RGB (channels == 3),
// row-major interleaved samples.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int w, int h, int c, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t sample_count() const { return data.size(); }

    friend bool operator==(const Image& a, const Image& b) = default;
};

struct NoiseParams {
    double cell_scale = 32.0; // pixels per lattice cell at octave 0
    int octaves = 1;
    double persistence = 0.5; // per-octave amplitude falloff, in (0, 1]
    std::uint64_t seed = 0;
    std::uint8_t bias = 128;  // base intensity
    double amplitude = 64.0;  // intensity range of the summed noise

    void validate() const; // throws validation_error
};

// --- PNG ---------------------------------------------------------------

// 8-bit grayscale or RGB only. Palette, alpha and 16-bit files raise
// unsupported_error; truncated or corrupt files raise decode_error;
// a missing file raises io_error.
Image load_png(const std::filesystem::path& path);
void save_png(const Image& img, const std::filesystem::path& path);

// Indexed-color variant used for segmentation masks: the palette index of
// each pixel is the label value. Grayscale files are accepted too (the
// sample value is the label). Returns a channels==1 image of labels.
Image load_png_indexed(const std::filesystem::path& path);
void save_png_indexed(const Image& labels,
                      std::span<const std::array<std::uint8_t, 3>> palette,
                      const std::filesystem::path& path);

// --- Perlin noise ------------------------------------------------------

// Classic 2-D gradient noise: seeded 256-entry permutation table
// (duplicated), diagonal gradients, quintic fade 6t^5 - 15t^4 + 10t^3.
// Zero at integer lattice points, |value| <= 1.
class PerlinTable {
public:
    explicit PerlinTable(std::uint64_t seed);
    double sample(double x, double y) const;

private:
    std::array<std::uint8_t, 512> perm_;
};

double perlin(double x, double y, std::uint64_t seed);

// pixel(x, y) = clamp(bias + amplitude * sum_k persistence^k *
//               perlin(x / (cell_scale / 2^k), y / (cell_scale / 2^k), seed_k))
// with seed_k = derive_seed(seed, k).
Image perlin_texture(int w, int h, const NoiseParams& p);

// --- Geometric transforms ----------------------------------------------

enum class Interp {
    bilinear, // natural images
    nearest   // masks and binarized images; introduces no new sample values
};

// Scales to target_h keeping the aspect ratio; width = round(w * target_h / h),
// at least 1.
Image resize_height(const Image& img, int target_h, Interp mode);

struct PadResult {
    Image image;
    int pad_start = 0; // first padded column == original width
};

// Extends to target_w with constant fill columns on the right.
PadResult pad_right(const Image& img, int target_w, std::uint8_t fill);

// Sets every column >= from_x to 0 on all channels.
Image blackout_from(const Image& img, int from_x);

} // namespace manuscript::raster

#endif
