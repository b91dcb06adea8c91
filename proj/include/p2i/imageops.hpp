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

#ifndef P2I_IMAGEOPS_HPP_
#define P2I_IMAGEOPS_HPP_

#include <cstdint>
#include <vector>

#include "p2i/raster.hpp"

namespace p2i {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using RgbImage = Raster<Rgb, struct RgbTag>;
/// Intensities in [0, 1].
using GrayImage = Raster<double, struct GrayTag>;
/// Nonnegative Sobel gradient magnitudes.
using GradientMap = Raster<double, struct GradientTag>;
using LabelRaster = Raster<std::int32_t, struct SuperpixelTag>;

/// Labels are 0..count-1 and every label's pixel set is 4-connected.
struct SuperpixelLabeling {
    LabelRaster labels;
    int count = 0;

    int width() const { return labels.width(); }
    int height() const { return labels.height(); }
};

struct SlicParams {
    int target_superpixels = 1000;
    double compactness = 10.0;
    int iterations = 10;
};

/// Rec. 601 luma of an 8-bit image, scaled to [0, 1].
GrayImage to_gray(const RgbImage& image);

/// sqrt(gx^2 + gy^2) with 3x3 Sobel kernels and replicate padding.
/// Parallelized over rows.
GradientMap sobel_magnitude(const GrayImage& image);

/// SLIC superpixels: k-means over (R, G, B, x, y) with grid-seeded centers,
/// each center searching a 2S x 2S window, followed by a connectivity pass
/// that merges orphan fragments into their largest neighbor. The assignment
/// step is parallelized over pixels.
SuperpixelLabeling slic(const RgbImage& image, const SlicParams& params);

namespace detail {

struct SlicCenter {
    double r = 0, g = 0, b = 0;
    double x = 0, y = 0;
};

struct SlicSetup {
    std::vector<SlicCenter> centers;
    double step = 1.0;  // S, the nominal grid interval
};

void validate_slic(const RgbImage& image, const SlicParams& params);
SlicSetup slic_seed_centers(const RgbImage& image, int target_superpixels);

/// Squared SLIC distance between a pixel and a center; spatial_scale2 is
/// (compactness / S)^2.
inline double slic_distance2(const Rgb& c, double px, double py, const SlicCenter& k,
                             double spatial_scale2) {
    const double dr = c.r - k.r, dg = c.g - k.g, db = c.b - k.b;
    const double dx = px - k.x, dy = py - k.y;
    return dr * dr + dg * dg + db * db + (dx * dx + dy * dy) * spatial_scale2;
}

/// Recomputes centers as label means; empty clusters keep their position.
void slic_update_centers(const RgbImage& image, const LabelRaster& labels,
                         std::vector<SlicCenter>& centers);

/// Gives unassigned (-1) pixels their nearest center, splits labels into
/// 4-connected components, merges small or orphan components into their
/// largest neighbor, and relabels contiguously in scan order.
SuperpixelLabeling slic_finalize(const RgbImage& image, LabelRaster labels,
                                 const std::vector<SlicCenter>& centers, double spatial_scale2,
                                 int target_superpixels);

}  // namespace detail

}  // namespace p2i

#endif  // P2I_IMAGEOPS_HPP_
