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

#include "p2i/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace p2i::reference {

GradientMap sobel_magnitude(const GrayImage& image) {
    const int w = image.width(), h = image.height();
    if (w < 3 || h < 3)
        throw std::invalid_argument("sobel_magnitude: image must be at least 3x3");
    constexpr int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    constexpr int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    GradientMap out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double gx = 0.0, gy = 0.0;
            for (int j = 0; j < 3; ++j) {
                for (int i = 0; i < 3; ++i) {
                    const int sx = std::clamp(x + i - 1, 0, w - 1);
                    const int sy = std::clamp(y + j - 1, 0, h - 1);
                    gx += kx[j][i] * image(sx, sy);
                    gy += ky[j][i] * image(sx, sy);
                }
            }
            out(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

SuperpixelLabeling slic(const RgbImage& image, const SlicParams& params) {
    detail::validate_slic(image, params);
    const int w = image.width(), h = image.height();
    detail::SlicSetup setup = detail::slic_seed_centers(image, params.target_superpixels);
    auto& centers = setup.centers;
    const double step = setup.step;
    const double scale2 = (params.compactness / step) * (params.compactness / step);

    LabelRaster labels(w, h, -1);
    std::vector<double> dist(image.size());
    for (int iter = 0; iter < params.iterations; ++iter) {
        std::fill(labels.values().begin(), labels.values().end(), -1);
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const detail::SlicCenter& c = centers[k];
            const int x0 = std::max(0, static_cast<int>(std::floor(c.x - step - 0.5)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + step - 0.5)));
            const int y0 = std::max(0, static_cast<int>(std::floor(c.y - step - 0.5)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + step - 0.5)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const double px = x + 0.5, py = y + 0.5;
                    if (std::abs(px - c.x) > step || std::abs(py - c.y) > step)
                        continue;
                    const double d = detail::slic_distance2(image(x, y), px, py, c, scale2);
                    const std::size_t i = labels.index(x, y);
                    if (d < dist[i]) {
                        dist[i] = d;
                        labels[i] = static_cast<int>(k);
                    }
                }
            }
        }
        detail::slic_update_centers(image, labels, centers);
    }
    return detail::slic_finalize(image, std::move(labels), centers, scale2,
                                 params.target_superpixels);
}

DistanceTable floyd_warshall(const Rag& g) {
    const int s = g.node_count();
    DistanceTable t{s, std::vector<double>(static_cast<std::size_t>(s) * s, kInfinity)};
    auto at = [&](int i, int j) -> double& { return t.values[static_cast<std::size_t>(i) * s + j]; };
    for (int i = 0; i < s; ++i)
        at(i, i) = 0.0;
    for (const Edge& e : g.edges())
        at(e.u, e.v) = at(e.v, e.u) = std::min(at(e.u, e.v), e.weight);
    for (int k = 0; k < s; ++k)
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j)
                if (at(i, k) + at(k, j) < at(i, j))
                    at(i, j) = at(i, k) + at(k, j);
    return t;
}

PoseInstanceMap pose_instance_map(std::span<const DistanceField> fields,
                                  const SuperpixelLabeling& labeling, double temperature) {
    const int n = static_cast<int>(fields.size());
    double scale = 0.0;
    for (const DistanceField& f : fields)
        for (double d : f)
            if (std::isfinite(d))
                scale = std::max(scale, d);
    if (scale == 0.0)
        scale = 1.0;
    PoseInstanceMap map(labeling.width(), labeling.height(), n);
    for (int y = 0; y < labeling.height(); ++y) {
        for (int x = 0; x < labeling.width(); ++x) {
            const int s = labeling.labels(x, y);
            double nearest = kInfinity;
            for (int i = 0; i < n; ++i)
                nearest = std::min(nearest, fields[i][s] / scale);
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = fields[i][s] / scale;
                map(x, y, i) = nearest == kInfinity ? 1.0
                               : d == kInfinity     ? 0.0
                                                    : std::exp(-(d - nearest) / temperature);
                sum += map(x, y, i);
            }
            for (int i = 0; i < n; ++i)
                map(x, y, i) /= sum;
        }
    }
    return map;
}

InstanceHeatmap fuse(const PoseInstanceMap& prior, const ScoreMap& score) {
    InstanceHeatmap heat(prior.width(), prior.height(), prior.instance_count());
    for (int y = 0; y < prior.height(); ++y)
        for (int x = 0; x < prior.width(); ++x)
            for (int i = 0; i < prior.instance_count(); ++i)
                heat(x, y, i) = prior(x, y, i) * score(x, y);
    return heat;
}

InstanceLabeling label_instances(const InstanceHeatmap& heat, const ScoreMap& score,
                                 double background_threshold) {
    InstanceLabeling labels(score.width(), score.height(), 0);
    for (int y = 0; y < score.height(); ++y) {
        for (int x = 0; x < score.width(); ++x) {
            if (score(x, y) < background_threshold || heat.instance_count() == 0)
                continue;
            int best = 0;
            for (int i = 1; i < heat.instance_count(); ++i)
                if (heat(x, y, i) > heat(x, y, best))
                    best = i;
            labels(x, y) = best + 1;
        }
    }
    return labels;
}

}  // namespace p2i::reference
