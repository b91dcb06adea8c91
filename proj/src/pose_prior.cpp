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

#include "p2i/pose_prior.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace p2i {

SkeletonSpec SkeletonSpec::coco() {
    // person_keypoints category skeleton, converted to 0-based joints.
    return SkeletonSpec({{15, 13}, {13, 11}, {16, 14}, {14, 12}, {11, 12}, {5, 11}, {6, 12},
                         {5, 6},   {5, 7},   {6, 8},   {7, 9},   {8, 10},  {1, 2},  {0, 1},
                         {0, 2},   {1, 3},   {2, 4},   {3, 5},   {4, 6}});
}

SkeletonSpec::SkeletonSpec(std::vector<Limb> limbs) : limbs_(std::move(limbs)) {
    std::set<Limb> seen;
    for (const auto& [a, b] : limbs_) {
        if (a < 0 || b < 0 || a >= kNumJoints || b >= kNumJoints)
            throw std::invalid_argument("skeleton limb (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ") references a joint outside 0..16");
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
            throw std::invalid_argument("duplicate skeleton limb (" + std::to_string(a) + ", " +
                                        std::to_string(b) + ")");
    }
}

PoseInstanceMap::PoseInstanceMap(int width, int height, int instance_count)
    : width_(width), height_(height), n_(instance_count),
      values_(static_cast<std::size_t>(width) * height * instance_count, 0.0) {}

Pixel joint_pixel(const Joint& j, int width, int height) {
    const auto x = static_cast<int>(std::clamp<long>(std::lround(j.x), 0, width - 1));
    const auto y = static_cast<int>(std::clamp<long>(std::lround(j.y), 0, height - 1));
    return {x, y};
}

std::vector<Pixel> bresenham_line(Pixel a, Pixel b) {
    std::vector<Pixel> out;
    const int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
    const int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    Pixel p = a;
    while (true) {
        out.push_back(p);
        if (p == b)
            break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            p.x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            p.y += sy;
        }
    }
    return out;
}

std::vector<Pixel> rasterize_skeleton(const KeypointSet& kp, const SkeletonSpec& spec, int width,
                                      int height) {
    std::set<Pixel> pixels;
    std::array<bool, kNumJoints> drawn{};
    for (const auto& [a, b] : spec.limbs()) {
        if (kp[a].v < 1 || kp[b].v < 1)
            continue;
        for (const Pixel& p :
             bresenham_line(joint_pixel(kp[a], width, height), joint_pixel(kp[b], width, height)))
            pixels.insert(p);
        drawn[a] = drawn[b] = true;
    }
    for (int k = 0; k < kNumJoints; ++k)
        if (kp[k].v >= 1 && !drawn[k])
            pixels.insert(joint_pixel(kp[k], width, height));
    return {pixels.begin(), pixels.end()};
}

std::vector<int> seeds_from_skeleton(std::span<const Pixel> pixels,
                                     const SuperpixelLabeling& labeling) {
    std::set<int> seeds;
    for (const Pixel& p : pixels) {
        if (!labeling.labels.contains(p.x, p.y))
            throw std::invalid_argument("seeds_from_skeleton: pixel outside the image");
        seeds.insert(labeling.labels(p.x, p.y));
    }
    return {seeds.begin(), seeds.end()};
}

std::vector<double> softmax_prior(std::span<const DistanceField> fields, double temperature) {
    if (fields.empty())
        throw std::invalid_argument("softmax_prior: no instances");
    if (!(temperature > 0.0))
        throw std::invalid_argument("softmax_prior: temperature must be positive");
    const std::size_t units = fields[0].size();
    const std::size_t n = fields.size();
    double scale = 0.0;
    for (const DistanceField& f : fields) {
        if (f.size() != units)
            throw std::invalid_argument("softmax_prior: fields differ in size");
        for (double d : f)
            if (std::isfinite(d))
                scale = std::max(scale, d);
    }
    if (scale == 0.0)
        scale = 1.0;

    std::vector<double> probs(units * n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t u = 0; u < static_cast<std::ptrdiff_t>(units); ++u) {
        double* out = probs.data() + static_cast<std::size_t>(u) * n;
        double nearest = kInfinity;
        for (std::size_t i = 0; i < n; ++i)
            nearest = std::min(nearest, fields[i][u] / scale);
        if (nearest == kInfinity) {
            std::fill(out, out + n, 1.0 / static_cast<double>(n));
            continue;
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = fields[i][u] / scale;
            out[i] = d == kInfinity ? 0.0 : std::exp(-(d - nearest) / temperature);
            sum += out[i];
        }
        for (std::size_t i = 0; i < n; ++i)
            out[i] /= sum;
    }
    return probs;
}

PoseInstanceMap pose_instance_map(std::span<const DistanceField> fields,
                                  const SuperpixelLabeling& labeling, double temperature) {
    for (const DistanceField& f : fields)
        if (f.size() != static_cast<std::size_t>(labeling.count))
            throw std::invalid_argument("pose_instance_map: field size " + std::to_string(f.size()) +
                                        " does not match superpixel count " +
                                        std::to_string(labeling.count));
    const std::vector<double> probs = softmax_prior(fields, temperature);
    const int n = static_cast<int>(fields.size());
    PoseInstanceMap map(labeling.width(), labeling.height(), n);
    const auto pixels = static_cast<std::ptrdiff_t>(labeling.labels.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pixels; ++p) {
        const double* src = probs.data() + static_cast<std::size_t>(labeling.labels[p]) * n;
        std::copy(src, src + n, map.pixel(static_cast<std::size_t>(p)).begin());
    }
    return map;
}

PoseInstanceMap pose_instance_map_from_pixels(std::span<const DistanceField> fields, int width,
                                              int height, double temperature) {
    const auto pixels = static_cast<std::size_t>(width) * height;
    for (const DistanceField& f : fields)
        if (f.size() != pixels)
            throw std::invalid_argument("pose_instance_map_from_pixels: field size mismatch");
    const std::vector<double> probs = softmax_prior(fields, temperature);
    PoseInstanceMap map(width, height, static_cast<int>(fields.size()));
    std::copy(probs.begin(), probs.end(), map.pixel(0).begin());
    return map;
}

KeypointHeatmap render_keypoint_heatmaps(const KeypointSet& kp, double sigma, int width, int height) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("render_keypoint_heatmaps: sigma must be positive");
    KeypointHeatmap hm;
    hm.width = width;
    hm.height = height;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int k = 0; k < kNumJoints; ++k) {
        auto& ch = hm.channels[k];
        ch.assign(static_cast<std::size_t>(width) * height, 0.0);
        if (kp[k].v < 1)
            continue;
        const Pixel c = joint_pixel(kp[k], width, height);
        for (int y = 0; y < height; ++y) {
            const double dy = y - c.y;
            for (int x = 0; x < width; ++x) {
                const double dx = x - c.x;
                ch[static_cast<std::size_t>(y) * width + x] = std::exp(-(dx * dx + dy * dy) * inv);
            }
        }
    }
    return hm;
}

KeypointHeatmap merge_heatmaps(std::span<const KeypointHeatmap> maps) {
    if (maps.empty())
        throw std::invalid_argument("merge_heatmaps: nothing to merge");
    KeypointHeatmap out = maps[0];
    for (const KeypointHeatmap& m : maps.subspan(1)) {
        if (m.width != out.width || m.height != out.height)
            throw std::invalid_argument("merge_heatmaps: dimension mismatch");
        for (int k = 0; k < kNumJoints; ++k)
            for (std::size_t i = 0; i < out.channels[k].size(); ++i)
                out.channels[k][i] = std::max(out.channels[k][i], m.channels[k][i]);
    }
    return out;
}

}  // namespace p2i
