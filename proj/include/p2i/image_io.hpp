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

#ifndef P2I_IMAGE_IO_HPP_
#define P2I_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>

#include "p2i/imageops.hpp"

namespace p2i {

using Gray8Image = Raster<std::uint8_t, struct Gray8Tag>;
using Gray16Image = Raster<std::uint16_t, struct Gray16Tag>;

// Dispatches on extension: .png, or .ppm/.pnm (binary P6). PNG input may be
// gray, gray+alpha, RGB or RGBA at 8 or 16 bits; alpha is dropped.
RgbImage read_image(const std::filesystem::path& path);

RgbImage read_png_rgb(const std::filesystem::path& path);
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const RgbImage& image, const std::filesystem::path& path);

void write_png(const RgbImage& image, const std::filesystem::path& path);
void write_png(const Gray8Image& image, const std::filesystem::path& path);
void write_png(const Gray16Image& image, const std::filesystem::path& path);
Gray16Image read_png_gray16(const std::filesystem::path& path);

}  // namespace p2i

#endif  // P2I_IMAGE_IO_HPP_
