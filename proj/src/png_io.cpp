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
// File: png_io.cpp
// Purpose: PNG read/write on top of libpng

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "manuscript/error.hpp"
#include "manuscript/raster.hpp"

namespace manuscript::raster {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; everything that must be cleaned up
// lives outside the setjmp region so we can destroy the png structs and
// rethrow as a C++ exception.
struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngReader() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) {
            destroy();
            throw decode_error("libpng: failed to allocate read structs");
        }
    }
    ~PngReader() { destroy(); }
    void destroy() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        png = nullptr;
        info = nullptr;
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;

    PngWriter() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) {
            destroy();
            throw io_error("libpng: failed to allocate write structs");
        }
    }
    ~PngWriter() { destroy(); }
    void destroy() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        png = nullptr;
        info = nullptr;
    }
};

struct Decoded {
    int width = 0;
    int height = 0;
    int color_type = 0;
    int bit_depth = 0;
    std::vector<std::uint8_t> rows;   // packed, bytes_per_row * height
    std::size_t bytes_per_row = 0;
};

Decoded read_png_file(const std::filesystem::path& path, bool expand_packed_indices) {
    if (!std::filesystem::exists(path))
        throw io_error("no such file: " + path.string());
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file)
        throw io_error("cannot open: " + path.string());

    // Two setjmp regions so every std::vector mutation happens outside of
    // them; after a longjmp we only destroy the libpng structs and throw.
    Decoded out;
    PngReader r;
    if (setjmp(png_jmpbuf(r.png)))
        throw decode_error("malformed PNG: " + path.string());
    png_init_io(r.png, file.get());
    png_read_info(r.png, r.info);

    out.width = static_cast<int>(png_get_image_width(r.png, r.info));
    out.height = static_cast<int>(png_get_image_height(r.png, r.info));
    out.color_type = png_get_color_type(r.png, r.info);
    out.bit_depth = png_get_bit_depth(r.png, r.info);

    if (expand_packed_indices && out.bit_depth < 8)
        png_set_packing(r.png); // 1/2/4-bit palette indices -> one byte each
    png_set_interlace_handling(r.png);
    png_read_update_info(r.png, r.info);

    out.bytes_per_row = png_get_rowbytes(r.png, r.info);
    out.rows.resize(out.bytes_per_row * static_cast<std::size_t>(out.height));
    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y)
        row_ptrs[static_cast<std::size_t>(y)] =
            out.rows.data() + out.bytes_per_row * static_cast<std::size_t>(y);

    if (setjmp(png_jmpbuf(r.png)))
        throw decode_error("malformed PNG: " + path.string());
    png_read_image(r.png, row_ptrs.data());
    png_read_end(r.png, nullptr);
    return out;
}

} // namespace

Image load_png(const std::filesystem::path& path) {
    Decoded d = read_png_file(path, /*expand_packed_indices=*/false);

    if (d.bit_depth != 8)
        throw unsupported_error("unsupported PNG bit depth " + std::to_string(d.bit_depth) +
                                ": " + path.string());
    int channels = 0;
    if (d.color_type == PNG_COLOR_TYPE_GRAY)
        channels = 1;
    else if (d.color_type == PNG_COLOR_TYPE_RGB)
        channels = 3;
    else if (d.color_type == PNG_COLOR_TYPE_PALETTE)
        throw unsupported_error("palette PNG not supported here (use load_png_indexed): " +
                                path.string());
    else
        throw unsupported_error("unsupported PNG color type " + std::to_string(d.color_type) +
                                ": " + path.string());

    Image img(d.width, d.height, channels);
    const std::size_t want = static_cast<std::size_t>(d.width) * channels;
    for (int y = 0; y < d.height; ++y) {
        const std::uint8_t* src = d.rows.data() + d.bytes_per_row * static_cast<std::size_t>(y);
        std::copy(src, src + want, img.data.begin() + want * static_cast<std::size_t>(y));
    }
    return img;
}

Image load_png_indexed(const std::filesystem::path& path) {
    Decoded d = read_png_file(path, /*expand_packed_indices=*/true);

    if (d.color_type != PNG_COLOR_TYPE_PALETTE && d.color_type != PNG_COLOR_TYPE_GRAY)
        throw unsupported_error("mask PNG must be palette or grayscale: " + path.string());
    if (d.color_type == PNG_COLOR_TYPE_GRAY && d.bit_depth != 8)
        throw unsupported_error("unsupported mask PNG bit depth " + std::to_string(d.bit_depth) +
                                ": " + path.string());

    Image img(d.width, d.height, 1);
    for (int y = 0; y < d.height; ++y) {
        const std::uint8_t* src = d.rows.data() + d.bytes_per_row * static_cast<std::size_t>(y);
        std::copy(src, src + d.width, img.data.begin() + static_cast<std::size_t>(d.width) * y);
    }
    return img;
}

void save_png(const Image& img, const std::filesystem::path& path) {
    if (img.width < 1 || img.height < 1 || (img.channels != 1 && img.channels != 3))
        throw validation_error("save_png: invalid image");
    if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels)
        throw validation_error("save_png: data length does not match dimensions");

    FilePtr file(std::fopen(path.string().c_str(), "wb"));
    if (!file)
        throw io_error("cannot write: " + path.string());

    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(img.height));
    const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y)
        row_ptrs[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(img.data.data() + stride * static_cast<std::size_t>(y));

    PngWriter w;
    if (setjmp(png_jmpbuf(w.png)))
        throw io_error("PNG write failed: " + path.string());

    png_init_io(w.png, file.get());
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    png_write_image(w.png, row_ptrs.data());
    png_write_end(w.png, nullptr);

    if (std::fflush(file.get()) != 0)
        throw io_error("PNG write failed: " + path.string());
}

void save_png_indexed(const Image& labels,
                      std::span<const std::array<std::uint8_t, 3>> palette,
                      const std::filesystem::path& path) {
    if (labels.channels != 1)
        throw validation_error("save_png_indexed: labels must be single-channel");
    if (palette.empty() || palette.size() > 256)
        throw validation_error("save_png_indexed: palette size must be in [1, 256]");
    for (std::uint8_t v : labels.data)
        if (v >= palette.size())
            throw validation_error("save_png_indexed: label " + std::to_string(v) +
                                   " outside palette");

    FilePtr file(std::fopen(path.string().c_str(), "wb"));
    if (!file)
        throw io_error("cannot write: " + path.string());

    PngWriter w;
    {
        std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(labels.height));
        std::vector<png_color> plte(palette.size());
        for (std::size_t i = 0; i < palette.size(); ++i)
            plte[i] = png_color{palette[i][0], palette[i][1], palette[i][2]};

        if (setjmp(png_jmpbuf(w.png)))
            throw io_error("PNG write failed: " + path.string());

        png_init_io(w.png, file.get());
        png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(labels.width),
                     static_cast<png_uint_32>(labels.height), 8, PNG_COLOR_TYPE_PALETTE,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_set_PLTE(w.png, w.info, plte.data(), static_cast<int>(plte.size()));
        png_write_info(w.png, w.info);

        for (int y = 0; y < labels.height; ++y)
            row_ptrs[static_cast<std::size_t>(y)] = const_cast<png_bytep>(
                labels.data.data() + static_cast<std::size_t>(labels.width) * y);
        png_write_image(w.png, row_ptrs.data());
        png_write_end(w.png, nullptr);
    }
    if (std::fflush(file.get()) != 0)
        throw io_error("PNG write failed: " + path.string());
}

} // namespace manuscript::raster
