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


#include <gtest/gtest.h>

#include <cmath>
#include <queue>
#include <random>
#include <set>

#include "p2i/imageops.hpp"
#include "p2i/reference.hpp"
#include "test_support.hpp"

namespace p2i {
namespace {

GrayImage step_image(int w, int h, bool vertical_edge) {
    GrayImage g(w, h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            g(x, y) = (vertical_edge ? x >= w / 2 : y >= h / 2) ? 1.0 : 0.0;
    return g;
}

// Every label in 0..count-1 is used and forms one 4-connected component.
void expect_valid_labeling(const SuperpixelLabeling& s) {
    const LabelRaster& l = s.labels;
    std::vector<int> seen_components(s.count, 0);
    std::vector<char> visited(l.size(), 0);
    for (int y = 0; y < l.height(); ++y) {
        for (int x = 0; x < l.width(); ++x) {
            ASSERT_GE(l(x, y), 0);
            ASSERT_LT(l(x, y), s.count);
            if (visited[l.index(x, y)])
                continue;
            const int label = l(x, y);
            ++seen_components[label];
            std::queue<Pixel> q;
            q.push({x, y});
            visited[l.index(x, y)] = 1;
            while (!q.empty()) {
                const Pixel p = q.front();
                q.pop();
                for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                    const int nx = p.x + dx, ny = p.y + dy;
                    if (l.contains(nx, ny) && !visited[l.index(nx, ny)] && l(nx, ny) == label) {
                        visited[l.index(nx, ny)] = 1;
                        q.push({nx, ny});
                    }
                }
            }
        }
    }
    for (int k = 0; k < s.count; ++k)
        EXPECT_EQ(seen_components[k], 1) << "label " << k;
}

TEST(ToGray, WhiteBlackAndRedCoefficient) {
    const GrayImage white = to_gray(RgbImage(3, 2, Rgb{255, 255, 255}));
    for (double v : white.values())
        EXPECT_EQ(v, 1.0);
    const GrayImage black = to_gray(RgbImage(3, 2, Rgb{0, 0, 0}));
    for (double v : black.values())
        EXPECT_EQ(v, 0.0);
    EXPECT_DOUBLE_EQ(to_gray(RgbImage(1, 1, Rgb{255, 0, 0}))[0], 0.299);
    EXPECT_DOUBLE_EQ(to_gray(RgbImage(1, 1, Rgb{0, 255, 0}))[0], 0.587);
    EXPECT_DOUBLE_EQ(to_gray(RgbImage(1, 1, Rgb{0, 0, 255}))[0], 0.114);
}

TEST(ToGray, EmptyImageRejected) {
    EXPECT_THROW(to_gray(RgbImage()), std::invalid_argument);
}

TEST(Sobel, ConstantImageHasNoGradient) {
    const GradientMap g = sobel_magnitude(GrayImage(7, 5, 0.4));
    for (double v : g.values())
        EXPECT_EQ(v, 0.0);
}

TEST(Sobel, VerticalStepGivesFour) {
    const GradientMap g = sobel_magnitude(step_image(8, 6, true));
    for (int y = 0; y < 6; ++y) {
        EXPECT_EQ(g(3, y), 4.0);
        EXPECT_EQ(g(4, y), 4.0);
        EXPECT_EQ(g(1, y), 0.0);
        EXPECT_EQ(g(6, y), 0.0);
    }
}

TEST(Sobel, HorizontalStepIsTransposeOfVertical) {
    const GradientMap v = sobel_magnitude(step_image(8, 6, true));
    const GradientMap h = sobel_magnitude(step_image(6, 8, false));
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 6; ++x)
            EXPECT_EQ(h(x, y), v(y, x));
    EXPECT_EQ(h(2, 3), 4.0);
}

TEST(Sobel, TooSmallRejected) {
    EXPECT_THROW(sobel_magnitude(GrayImage(2, 5)), std::invalid_argument);
    EXPECT_THROW(sobel_magnitude(GrayImage(5, 2)), std::invalid_argument);
}

TEST(Sobel, MatchesSerialReference) {
    std::mt19937 rng(3);
    for (int t = 0; t < 5; ++t) {
        const GrayImage g = to_gray(testing::random_image(37, 23, rng));
        const GradientMap a = sobel_magnitude(g), b = reference::sobel_magnitude(g);
        for (std::size_t i = 0; i < a.size(); ++i)
            EXPECT_NEAR(a[i], b[i], 1e-12);
    }
}

TEST(Slic, SingleTargetCoversImage) {
    std::mt19937 rng(1);
    const SuperpixelLabeling s = slic(testing::random_image(20, 15, rng), {1, 10.0, 10});
    EXPECT_EQ(s.count, 1);
    for (int v : s.labels.values())
        EXPECT_EQ(v, 0);
}

TEST(Slic, ConstantImageSplitsIntoQuadrants) {
    const SuperpixelLabeling s = slic(RgbImage(64, 64, Rgb{90, 140, 30}), {4, 10.0, 10});
    ASSERT_EQ(s.count, 4);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            ASSERT_EQ(s.labels(x, y), (y / 32) * 2 + x / 32) << x << "," << y;
}

TEST(Slic, LabelingInvariantsOnRandomImages) {
    std::mt19937 rng(5);
    for (int t = 0; t < 6; ++t) {
        const int w = 20 + 13 * t, h = 15 + 7 * t;
        const RgbImage img = t % 2 ? testing::random_image(w, h, rng) : testing::blocky_image(w, h, rng);
        const int target = 3 + 17 * t;
        const SuperpixelLabeling s = slic(img, {target, 10.0, 10});
        EXPECT_EQ(s.width(), w);
        EXPECT_GE(s.count, 1);
        expect_valid_labeling(s);
    }
}

TEST(Slic, TargetEqualToPixelCount) {
    std::mt19937 rng(8);
    const SuperpixelLabeling s = slic(testing::random_image(5, 4, rng), {20, 10.0, 10});
    expect_valid_labeling(s);
}

TEST(Slic, MatchesSerialReference) {
    std::mt19937 rng(9);
    for (int t = 0; t < 4; ++t) {
        const RgbImage img = testing::blocky_image(50 + 10 * t, 40, rng);
        const SlicParams params{40 + 25 * t, 5.0 + 5 * t, 10};
        const SuperpixelLabeling a = slic(img, params), b = reference::slic(img, params);
        EXPECT_EQ(a.count, b.count);
        EXPECT_EQ(a.labels, b.labels);
    }
}

TEST(Slic, InvalidParameters) {
    const RgbImage img(4, 4);
    EXPECT_THROW(slic(img, {0, 10.0, 10}), std::invalid_argument);
    EXPECT_THROW(slic(img, {17, 10.0, 10}), std::invalid_argument);
    EXPECT_THROW(slic(img, {4, 0.0, 10}), std::invalid_argument);
    EXPECT_THROW(slic(RgbImage(), {1, 10.0, 10}), std::invalid_argument);
}

TEST(Slic, SeedGridShape) {
    // 4:3 image, target 12 -> nx = round(sqrt(16)) = 4, ny = 3.
    const auto setup = detail::slic_seed_centers(RgbImage(40, 30), 12);
    EXPECT_EQ(setup.centers.size(), 12u);
    EXPECT_DOUBLE_EQ(setup.step, 10.0);
    std::set<std::pair<double, double>> positions;
    for (const auto& c : setup.centers)
        positions.insert({c.x, c.y});
    EXPECT_TRUE(positions.count({5.0, 5.0}));
    EXPECT_TRUE(positions.count({35.0, 25.0}));
}

}  // namespace
}  // namespace p2i
