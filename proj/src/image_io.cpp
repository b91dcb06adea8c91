// Copyright 2026 The pose2inst Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "p2i/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "p2i/errors.hpp"

namespace p2i {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw CodecError("cannot open " + path.string());
    return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    auto* what = static_cast<std::string*>(png_get_error_ptr(png));
    if (what)
        *what = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

// Decoded PNG rows after normalizing to 8-bit RGB or 16-bit gray.
struct PngData {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<std::uint8_t> bytes;
};

PngData read_png_raw(const std::filesystem::path& path, bool want_gray16) {
    FilePtr file = open_file(path, "rb");
    std::string error;
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    if (!png)
        throw CodecError("png: out of memory");
    png_infop info = png_create_info_struct(png);
    PngData data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CodecError(path.string() + ": " + error);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (want_gray16) {
        if (color != PNG_COLOR_TYPE_GRAY)
            png_error(png, "expected a grayscale PNG");
        if (depth < 8)
            png_set_expand_gray_1_2_4_to_8(png);
        if (depth == 16)
            png_set_swap(png);  // host little-endian order
    } else {
        if (color == PNG_COLOR_TYPE_PALETTE)
            png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
            png_set_expand_gray_1_2_4_to_8(png);
        if (depth == 16)
            png_set_strip_16(png);
        if (color & PNG_COLOR_MASK_ALPHA)
            png_set_strip_alpha(png);
        if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);
    data.width = static_cast<int>(png_get_image_width(png, info));
    data.height = static_cast<int>(png_get_image_height(png, info));
    data.channels = png_get_channels(png, info);
    data.bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    data.bytes.resize(rowbytes * static_cast<std::size_t>(data.height));
    rows.resize(static_cast<std::size_t>(data.height));
    for (int y = 0; y < data.height; ++y)
        rows[y] = data.bytes.data() + rowbytes * static_cast<std::size_t>(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return data;
}

void write_png_raw(const std::filesystem::path& path, int width, int height, int color_type,
                   int bit_depth, const std::vector<png_bytep>& rows) {
    FilePtr file = open_file(path, "wb");
    std::string error;
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
    if (!png)
        throw CodecError("png: out of memory");
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw CodecError(path.string() + ": " + error);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16)
        png_set_swap(png);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// Next whitespace-delimited header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty())
                break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

}  // namespace

RgbImage read_png_rgb(const std::filesystem::path& path) {
    PngData data = read_png_raw(path, false);
    RgbImage img(data.width, data.height);
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = {data.bytes[3 * i], data.bytes[3 * i + 1], data.bytes[3 * i + 2]};
    return img;
}

Gray16Image read_png_gray16(const std::filesystem::path& path) {
    PngData data = read_png_raw(path, true);
    Gray16Image img(data.width, data.height);
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (data.bit_depth == 16)
            img[i] = static_cast<std::uint16_t>(data.bytes[2 * i] | (data.bytes[2 * i + 1] << 8));
        else
            img[i] = data.bytes[i];
    }
    return img;
}

RgbImage read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CodecError("cannot open " + path.string());
    if (pnm_token(in) != "P6")
        throw CodecError(path.string() + ": only binary P6 PPM is supported");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(pnm_token(in));
        h = std::stoi(pnm_token(in));
        maxval = std::stoi(pnm_token(in));
    } catch (const std::exception&) {
        throw CodecError(path.string() + ": malformed PPM header");
    }
    if (w <= 0 || h <= 0 || maxval != 255)
        throw CodecError(path.string() + ": unsupported PPM geometry or depth");
    RgbImage img(w, h);
    std::vector<char> buf(img.size() * 3);
    if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size())))
        throw CodecError(path.string() + ": truncated PPM data");
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = {static_cast<std::uint8_t>(buf[3 * i]), static_cast<std::uint8_t>(buf[3 * i + 1]),
                  static_cast<std::uint8_t>(buf[3 * i + 2])};
    return img;
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw CodecError("cannot write " + path.string());
    out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
    for (const Rgb& p : image.values()) {
        const char px[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
        out.write(px, 3);
    }
}

RgbImage read_image(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png")
        return read_png_rgb(path);
    if (ext == ".ppm" || ext == ".pnm")
        return read_ppm(path);
    throw CodecError(path.string() + ": unsupported image format '" + ext + "'");
}

void write_png(const RgbImage& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(image.size() * 3);
    for (std::size_t i = 0; i < image.size(); ++i) {
        bytes[3 * i] = image[i].r;
        bytes[3 * i + 1] = image[i].g;
        bytes[3 * i + 2] = image[i].b;
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
    for (int y = 0; y < image.height(); ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * image.width() * 3;
    write_png_raw(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

void write_png(const Gray8Image& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(image.values().begin(), image.values().end());
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
    for (int y = 0; y < image.height(); ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * image.width();
    write_png_raw(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 8, rows);
}

void write_png(const Gray16Image& image, const std::filesystem::path& path) {
    std::vector<std::uint16_t> words(image.values().begin(), image.values().end());
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
    for (int y = 0; y < image.height(); ++y)
        rows[y] = reinterpret_cast<png_bytep>(words.data() + static_cast<std::size_t>(y) * image.width());
    write_png_raw(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 16, rows);
}

}  // namespace p2i
