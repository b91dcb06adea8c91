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

#include "p2i/imageops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace p2i {

GrayImage to_gray(const RgbImage& image) {
    if (image.empty())
        throw std::invalid_argument("to_gray: empty image");
    GrayImage gray(image.width(), image.height());
    // Integer numerator keeps white at exactly 1.0.
    constexpr double kScale = 1000.0 * 255.0;
    for (std::size_t i = 0; i < image.size(); ++i) {
        const Rgb& p = image[i];
        const int num = 299 * p.r + 587 * p.g + 114 * p.b;
        gray[i] = num / kScale;
    }
    return gray;
}

GradientMap sobel_magnitude(const GrayImage& image) {
    const int w = image.width(), h = image.height();
    if (w < 3 || h < 3)
        throw std::invalid_argument("sobel_magnitude: image must be at least 3x3");
    GradientMap out(w, h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            const double gx = (image(xp, ym) - image(xm, ym)) + 2.0 * (image(xp, y) - image(xm, y)) +
                              (image(xp, yp) - image(xm, yp));
            const double gy = (image(xm, yp) - image(xm, ym)) + 2.0 * (image(x, yp) - image(x, ym)) +
                              (image(xp, yp) - image(xp, ym));
            out(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

namespace detail {

void validate_slic(const RgbImage& image, const SlicParams& params) {
    if (image.empty())
        throw std::invalid_argument("slic: empty image");
    if (params.target_superpixels < 1)
        throw std::invalid_argument("slic: target_superpixels must be >= 1");
    if (static_cast<std::size_t>(params.target_superpixels) > image.size())
        throw std::invalid_argument("slic: target_superpixels exceeds pixel count");
    if (!(params.compactness > 0.0))
        throw std::invalid_argument("slic: compactness must be positive");
    if (params.iterations < 0)
        throw std::invalid_argument("slic: iterations must be nonnegative");
}

SlicSetup slic_seed_centers(const RgbImage& image, int target) {
    const int w = image.width(), h = image.height();
    const double n = static_cast<double>(image.size());
    // nx * ny <= target, so target 1 always yields one center.
    const int nx = std::clamp(static_cast<int>(std::lround(std::sqrt(target * double(w) / h))), 1,
                              std::min(target, w));
    const int ny = std::clamp(target / nx, 1, h);
    SlicSetup setup;
    setup.step = std::sqrt(n / target);
    setup.centers.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            SlicCenter c;
            c.x = (i + 0.5) * w / nx;
            c.y = (j + 0.5) * h / ny;
            const Rgb& p = image(std::min(static_cast<int>(c.x), w - 1),
                                 std::min(static_cast<int>(c.y), h - 1));
            c.r = p.r;
            c.g = p.g;
            c.b = p.b;
            setup.centers.push_back(c);
        }
    }
    return setup;
}

void slic_update_centers(const RgbImage& image, const LabelRaster& labels,
                         std::vector<SlicCenter>& centers) {
    struct Acc {
        double r = 0, g = 0, b = 0, x = 0, y = 0;
        std::size_t n = 0;
    };
    std::vector<Acc> acc(centers.size());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const int k = labels(x, y);
            if (k < 0)
                continue;
            const Rgb& p = image(x, y);
            Acc& a = acc[k];
            a.r += p.r;
            a.g += p.g;
            a.b += p.b;
            a.x += x + 0.5;
            a.y += y + 0.5;
            ++a.n;
        }
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
        const Acc& a = acc[k];
        if (a.n == 0)
            continue;
        const double n = static_cast<double>(a.n);
        centers[k] = {a.r / n, a.g / n, a.b / n, a.x / n, a.y / n};
    }
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    std::vector<std::size_t> size;

    explicit UnionFind(const std::vector<std::size_t>& sizes) : parent(sizes.size()), size(sizes) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    // Attaches a's group under root b.
    void attach(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        parent[a] = b;
        size[b] += size[a];
    }
};

}  // namespace

SuperpixelLabeling slic_finalize(const RgbImage& image, LabelRaster labels,
                                 const std::vector<SlicCenter>& centers, double spatial_scale2,
                                 int target_superpixels) {
    const int w = image.width(), h = image.height();

    // Pixels no window reached get the globally nearest center.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (labels(x, y) >= 0)
                continue;
            double best = std::numeric_limits<double>::infinity();
            int best_k = 0;
            for (std::size_t k = 0; k < centers.size(); ++k) {
                const double d = slic_distance2(image(x, y), x + 0.5, y + 0.5, centers[k], spatial_scale2);
                if (d < best) {
                    best = d;
                    best_k = static_cast<int>(k);
                }
            }
            labels(x, y) = best_k;
        }
    }

    // 4-connected components of the k-means labels, numbered in scan order.
    LabelRaster comp(w, h, -1);
    std::vector<std::size_t> comp_size;
    std::vector<int> comp_label;
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (comp(x, y) >= 0)
                continue;
            const int id = static_cast<int>(comp_size.size());
            const int lab = labels(x, y);
            std::size_t count = 0;
            comp(x, y) = id;
            stack.assign(1, static_cast<int>(comp.index(x, y)));
            while (!stack.empty()) {
                const int i = stack.back();
                stack.pop_back();
                ++count;
                const int cx = i % w, cy = i / w;
                const int nbr[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
                for (const auto& n : nbr) {
                    if (!comp.contains(n[0], n[1]) || comp(n[0], n[1]) >= 0 ||
                        labels(n[0], n[1]) != lab)
                        continue;
                    comp(n[0], n[1]) = id;
                    stack.push_back(static_cast<int>(comp.index(n[0], n[1])));
                }
            }
            comp_size.push_back(count);
            comp_label.push_back(lab);
        }
    }
    const int ncomp = static_cast<int>(comp_size.size());

    std::vector<int> largest(centers.size(), -1);
    for (int c = 0; c < ncomp; ++c) {
        int& l = largest[comp_label[c]];
        if (l < 0 || comp_size[c] > comp_size[l])
            l = c;
    }
    const std::size_t min_size =
        std::max<std::size_t>(1, image.size() / static_cast<std::size_t>(target_superpixels) / 4);

    std::vector<std::vector<int>> neighbors(ncomp);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int a = comp(x, y);
            if (x + 1 < w && comp(x + 1, y) != a) {
                neighbors[a].push_back(comp(x + 1, y));
                neighbors[comp(x + 1, y)].push_back(a);
            }
            if (y + 1 < h && comp(x, y + 1) != a) {
                neighbors[a].push_back(comp(x, y + 1));
                neighbors[comp(x, y + 1)].push_back(a);
            }
        }
    }
    for (auto& n : neighbors) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }

    UnionFind groups(comp_size);
    for (int c = 0; c < ncomp; ++c) {
        const bool keeper = largest[comp_label[c]] == c && comp_size[c] >= min_size;
        if (keeper)
            continue;
        const int root = groups.find(c);
        int target = -1;
        for (int n : neighbors[c]) {
            const int r = groups.find(n);
            if (r == root)
                continue;
            if (target < 0 || groups.size[r] > groups.size[target] ||
                (groups.size[r] == groups.size[target] && r < target))
                target = r;
        }
        if (target >= 0)
            groups.attach(c, target);
    }

    SuperpixelLabeling out{LabelRaster(w, h, -1), 0};
    std::vector<int> relabel(ncomp, -1);
    for (std::size_t i = 0; i < comp.size(); ++i) {
        const int root = groups.find(comp[i]);
        if (relabel[root] < 0)
            relabel[root] = out.count++;
        out.labels[i] = relabel[root];
    }
    return out;
}

}  // namespace detail

SuperpixelLabeling slic(const RgbImage& image, const SlicParams& params) {
    detail::validate_slic(image, params);
    const int w = image.width(), h = image.height();
    detail::SlicSetup setup = detail::slic_seed_centers(image, params.target_superpixels);
    auto& centers = setup.centers;
    const double step = setup.step;
    const double scale2 = (params.compactness / step) * (params.compactness / step);

    // Centers bucketed on an S-sized grid; a center within S of a pixel lies
    // in one of the 3x3 cells around the pixel's cell.
    const int gx = static_cast<int>(w / step) + 2;
    const int gy = static_cast<int>(h / step) + 2;
    std::vector<std::vector<int>> buckets(static_cast<std::size_t>(gx) * gy);
    auto cell_of = [&](double v, int limit) {
        return std::clamp(static_cast<int>(std::floor(v / step)), 0, limit - 1);
    };

    LabelRaster labels(w, h, -1);
    for (int iter = 0; iter < params.iterations; ++iter) {
        for (auto& b : buckets)
            b.clear();
        for (std::size_t k = 0; k < centers.size(); ++k)
            buckets[static_cast<std::size_t>(cell_of(centers[k].y, gy)) * gx +
                    cell_of(centers[k].x, gx)]
                .push_back(static_cast<int>(k));

#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            const double py = y + 0.5;
            const int cy0 = cell_of(py - step, gy), cy1 = cell_of(py + step, gy);
            for (int x = 0; x < w; ++x) {
                const double px = x + 0.5;
                const int cx0 = cell_of(px - step, gx), cx1 = cell_of(px + step, gx);
                double best = std::numeric_limits<double>::infinity();
                int best_k = -1;
                for (int cy = cy0; cy <= cy1; ++cy) {
                    for (int cx = cx0; cx <= cx1; ++cx) {
                        for (int k : buckets[static_cast<std::size_t>(cy) * gx + cx]) {
                            const detail::SlicCenter& c = centers[k];
                            if (std::abs(px - c.x) > step || std::abs(py - c.y) > step)
                                continue;
                            const double d = detail::slic_distance2(image(x, y), px, py, c, scale2);
                            if (d < best || (d == best && k < best_k)) {
                                best = d;
                                best_k = k;
                            }
                        }
                    }
                }
                labels(x, y) = best_k;
            }
        }
        detail::slic_update_centers(image, labels, centers);
    }
    return detail::slic_finalize(image, std::move(labels), centers, scale2,
                                 params.target_superpixels);
}

}  // namespace p2i
