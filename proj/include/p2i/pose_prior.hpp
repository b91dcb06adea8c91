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

#ifndef P2I_POSE_PRIOR_HPP_
#define P2I_POSE_PRIOR_HPP_

#include <array>
#include <span>
#include <vector>

#include "p2i/annotations.hpp"
#include "p2i/graph.hpp"
#include "p2i/imageops.hpp"

namespace p2i {

inline constexpr double kDefaultTemperature = 0.25;

/// Limbs as 0-based joint index pairs.
class SkeletonSpec {
public:
    /// The 19-limb COCO person skeleton.
    static SkeletonSpec coco();
    /// Throws std::invalid_argument for out-of-range or duplicate limbs.
    explicit SkeletonSpec(std::vector<Limb> limbs);

    const std::vector<Limb>& limbs() const { return limbs_; }

private:
    std::vector<Limb> limbs_;
};

/// h x w x n likelihoods stored pixel-major (the n values of a pixel are
/// contiguous). Each pixel's values sum to 1.
class PoseInstanceMap {
public:
    PoseInstanceMap() = default;
    PoseInstanceMap(int width, int height, int instance_count);

    int width() const { return width_; }
    int height() const { return height_; }
    int instance_count() const { return n_; }

    double operator()(int x, int y, int i) const { return values_[offset(x, y) + i]; }
    double& operator()(int x, int y, int i) { return values_[offset(x, y) + i]; }
    std::span<const double> pixel(std::size_t p) const {
        return {values_.data() + p * n_, static_cast<std::size_t>(n_)};
    }
    std::span<double> pixel(std::size_t p) {
        return {values_.data() + p * n_, static_cast<std::size_t>(n_)};
    }
    std::span<const double> values() const { return values_; }

    friend bool operator==(const PoseInstanceMap&, const PoseInstanceMap&) = default;

private:
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width_ + x) * n_;
    }
    int width_ = 0;
    int height_ = 0;
    int n_ = 0;
    std::vector<double> values_;
};

/// 17 channels, one Gaussian bump per labeled joint.
struct KeypointHeatmap {
    int width = 0;
    int height = 0;
    std::array<std::vector<double>, kNumJoints> channels;

    double operator()(int k, int x, int y) const {
        return channels[k][static_cast<std::size_t>(y) * width + x];
    }
};

/// Rounded joint position clamped into the image.
Pixel joint_pixel(const Joint& j, int width, int height);

/// Bresenham lines for every limb whose endpoints both have v >= 1, plus a
/// single pixel for each labeled joint that no drawn limb touches. Sorted,
/// duplicate-free.
std::vector<Pixel> rasterize_skeleton(const KeypointSet& kp, const SkeletonSpec& spec, int width,
                                      int height);

/// All pixels on the digital line between a and b, endpoints included.
std::vector<Pixel> bresenham_line(Pixel a, Pixel b);

/// Sorted superpixel labels covering at least one of the pixels.
std::vector<int> seeds_from_skeleton(std::span<const Pixel> pixels,
                                     const SuperpixelLabeling& labeling);

/// Softmax over negated distances. Distances are divided by the largest
/// finite distance over all fields, then value_i = exp(-d_i / tau) /
/// sum_j exp(-d_j / tau). Infinite distances get zero mass; a unit that is
/// infinite for every instance gets the uniform distribution.
/// Returns unit-major probabilities (unit_count x n).
std::vector<double> softmax_prior(std::span<const DistanceField> fields, double temperature);

/// Per-pixel prior from per-superpixel distance fields. Parallelized over pixels.
PoseInstanceMap pose_instance_map(std::span<const DistanceField> fields,
                                  const SuperpixelLabeling& labeling,
                                  double temperature = kDefaultTemperature);

/// Same normalization when each field is already per pixel (row-major h*w).
PoseInstanceMap pose_instance_map_from_pixels(std::span<const DistanceField> fields, int width,
                                              int height, double temperature = kDefaultTemperature);

KeypointHeatmap render_keypoint_heatmaps(const KeypointSet& kp, double sigma, int width, int height);

/// Channel-wise maximum over several people.
KeypointHeatmap merge_heatmaps(std::span<const KeypointHeatmap> maps);

}  // namespace p2i

#endif  // P2I_POSE_PRIOR_HPP_
