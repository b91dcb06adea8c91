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
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "p2i/errors.hpp"
#include "p2i/fusion.hpp"
#include "p2i/reference.hpp"
#include "test_support.hpp"

namespace p2i {
namespace {

PoseInstanceMap random_prior(int w, int h, int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PoseInstanceMap m(w, h, n);
    for (std::size_t p = 0; p < static_cast<std::size_t>(w) * h; ++p) {
        double sum = 0.0;
        for (double& v : m.pixel(p))
            sum += v = u(rng);
        for (double& v : m.pixel(p))
            v /= sum;
    }
    return m;
}

ScoreMap random_score(int w, int h, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScoreMap s(w, h);
    for (double& v : s.values())
        v = u(rng);
    return s;
}

TEST(PipelineConfig, Validation) {
    EXPECT_NO_THROW(PipelineConfig{}.validate());
    PipelineConfig c;
    c.temperature = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.background_threshold = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.superpixels = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Fuse, IdentityZeroAndProduct) {
    std::mt19937 rng(41);
    const PoseInstanceMap prior = random_prior(6, 5, 3, rng);
    EXPECT_EQ(fuse(prior, ScoreMap(6, 5, 1.0)), prior);
    const InstanceHeatmap zero = fuse(prior, ScoreMap(6, 5, 0.0));
    for (double v : zero.values())
        EXPECT_EQ(v, 0.0);
    PoseInstanceMap one(1, 1, 2);
    one(0, 0, 0) = 0.8;
    one(0, 0, 1) = 0.2;
    const InstanceHeatmap h = fuse(one, ScoreMap(1, 1, 0.5));
    EXPECT_DOUBLE_EQ(h(0, 0, 0), 0.4);
    EXPECT_DOUBLE_EQ(h(0, 0, 1), 0.1);
    EXPECT_THROW(fuse(prior, ScoreMap(5, 5)), std::invalid_argument);
}

TEST(Fuse, MatchesSerialReference) {
    std::mt19937 rng(42);
    const PoseInstanceMap prior = random_prior(31, 17, 4, rng);
    const ScoreMap score = random_score(31, 17, rng);
    EXPECT_EQ(fuse(prior, score), reference::fuse(prior, score));
}

TEST(LabelInstances, ThresholdAndTies) {
    PoseInstanceMap heat(2, 1, 2);
    heat(0, 0, 0) = heat(0, 0, 1) = 0.3;
    heat(1, 0, 0) = 0.1;
    heat(1, 0, 1) = 0.2;
    ScoreMap score(2, 1, 0.6);
    const InstanceLabeling l = label_instances(heat, score, 0.5);
    EXPECT_EQ(l(0, 0), 1);
    EXPECT_EQ(l(1, 0), 2);
    const InstanceLabeling none = label_instances(heat, ScoreMap(2, 1, 0.49), 0.5);
    for (int v : none.values())
        EXPECT_EQ(v, 0);
    // The threshold itself counts as person.
    EXPECT_EQ(label_instances(heat, ScoreMap(2, 1, 0.5), 0.5)(1, 0), 2);
}

TEST(LabelInstances, SingleInstanceRegion) {
    PoseInstanceMap heat(3, 3, 1);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            heat(x, y, 0) = 1.0;
    ScoreMap score(3, 3, 0.0);
    score(1, 1) = score(2, 1) = 0.9;
    const InstanceLabeling l = label_instances(heat, score, 0.5);
    EXPECT_EQ(mask_area(instance_mask(l, 1)), 2u);
    EXPECT_EQ(l(1, 1), 1);
}

TEST(LabelInstances, MatchesSerialReference) {
    std::mt19937 rng(43);
    const PoseInstanceMap prior = random_prior(29, 19, 3, rng);
    const ScoreMap score = random_score(29, 19, rng);
    const InstanceHeatmap heat = fuse(prior, score);
    EXPECT_EQ(label_instances(heat, score, 0.5), reference::label_instances(heat, score, 0.5));
}

TEST(BboxBaseline, DisjointNestedAndLowScore) {
    ScoreMap score(10, 10, 0.9);
    score(8, 8) = 0.1;
    const std::vector<BBox> boxes{{0, 0, 4, 4}, {5, 5, 5, 5}, {1, 1, 2, 2}};
    const InstanceLabeling l = bbox_baseline(score, boxes, 0.5);
    EXPECT_EQ(l(0, 0), 1);
    EXPECT_EQ(l(1, 1), 3);  // inside the smaller nested box
    EXPECT_EQ(l(2, 2), 3);
    EXPECT_EQ(l(3, 3), 1);
    EXPECT_EQ(l(6, 6), 2);
    EXPECT_EQ(l(8, 8), 0);
    EXPECT_EQ(l(4, 4), 0);  // in no box
}

TEST(BboxBaseline, PixelCenterContainmentAndEqualAreaTie) {
    ScoreMap score(4, 1, 1.0);
    // Center 1.5 is inside [0.6, 1.6); center 0.5 is not.
    const std::vector<BBox> a{{0.6, 0, 1.0, 1}};
    const InstanceLabeling l = bbox_baseline(score, a, 0.5);
    EXPECT_EQ(l(0, 0), 0);
    EXPECT_EQ(l(1, 0), 1);
    const std::vector<BBox> same{{0, 0, 2, 1}, {0, 0, 2, 1}};
    EXPECT_EQ(bbox_baseline(score, same, 0.5)(0, 0), 1);
}

TEST(GridFastSweeping, SeedIsZeroAndCornerDiagonal) {
    const GradientMap cost(3, 3, 0.0);
    const std::vector<Pixel> seeds{{0, 0}};
    const auto d = grid_fast_sweeping(cost, seeds, 1.0);
    EXPECT_EQ(d[0], 0.0);
    EXPECT_DOUBLE_EQ(d[8], 2.0 * std::numbers::sqrt2);
    EXPECT_DOUBLE_EQ(d[2], 2.0);
}

TEST(GridFastSweeping, MatchesBestFirstOracle) {
    std::mt19937 rng(44);
    std::uniform_real_distribution<double> c(0.0, 5.0);
    std::uniform_int_distribution<int> coord(0, 11);
    for (int t = 0; t < 30; ++t) {
        GradientMap cost(12, 12);
        for (double& v : cost.values())
            v = c(rng);
        std::vector<Pixel> seeds;
        for (int s = 0; s <= t % 3; ++s)
            seeds.push_back({coord(rng), coord(rng)});
        const auto a = grid_fast_sweeping(cost, seeds, 1e-3);
        const auto b = testing::grid_dijkstra(cost, seeds, 1e-3);
        for (std::size_t i = 0; i < a.size(); ++i)
            EXPECT_NEAR(a[i], b[i], 1e-9);
    }
}

TEST(GridFastSweeping, InvalidInputs) {
    const GradientMap cost(3, 3, 0.0);
    EXPECT_THROW(grid_fast_sweeping(cost, {}, 1.0), std::invalid_argument);
    const std::vector<Pixel> outside{{3, 0}};
    EXPECT_THROW(grid_fast_sweeping(cost, outside, 1.0), std::invalid_argument);
    const std::vector<Pixel> ok{{0, 0}};
    EXPECT_THROW(grid_fast_sweeping(cost, ok, 0.0), std::invalid_argument);
}

TEST(PersonProbability, StableAtExtremes) {
    EXPECT_EQ(person_probability(0.0, 0.0), 0.5);
    EXPECT_EQ(person_probability(-1000.0, 1000.0), 1.0);
    EXPECT_EQ(person_probability(1000.0, -1000.0), 0.0);
    EXPECT_NEAR(person_probability(1.0, 3.0), std::exp(3.0) / (std::exp(1.0) + std::exp(3.0)), 1e-15);
}

TEST(CascadeHead, ZeroWeightsReproduceSoftmax) {
    std::mt19937 rng(45);
    std::normal_distribution<double> n(0.0, 3.0);
    SegLogits logits{9, 7, std::vector<double>(2 * 63)};
    for (double& v : logits.values)
        v = n(rng);
    KeypointSet kp{};
    kp[0] = {4, 3, 2};
    const KeypointHeatmap heat = render_keypoint_heatmaps(kp, 2.0, 9, 7);
    CascadeWeights zero;
    CascadeWeights no_shape;
    no_shape.heat_weights.fill(0.7);
    for (const CascadeWeights& w : {zero, no_shape}) {
        const ScoreMap s = cascade_head(logits, heat, w);
        for (std::size_t p = 0; p < s.size(); ++p)
            EXPECT_EQ(s[p], person_probability(logits.background(p), logits.person(p)));
    }
}

TEST(CascadeHead, SinglePixelHandExample) {
    SegLogits logits{1, 1, {0.0, 0.0}};
    KeypointSet kp{};
    kp[0] = {0, 0, 2};
    const KeypointHeatmap heat = render_keypoint_heatmaps(kp, 1.0, 1, 1);
    CascadeWeights w;
    w.heat_weights[0] = 1.0;  // shape = 1
    w.shape_weight = 2.0;
    const double p = cascade_head(logits, heat, w)[0];
    EXPECT_NEAR(p, 0.88080, 1e-5);
    EXPECT_DOUBLE_EQ(p, std::exp(2.0) / (1.0 + std::exp(2.0)));
}

TEST(CascadeHead, DimensionMismatch) {
    SegLogits logits{2, 2, std::vector<double>(8)};
    EXPECT_THROW(cascade_head(logits, render_keypoint_heatmaps({}, 1.0, 3, 2), {}),
                 std::invalid_argument);
}

TEST(InstanceConfidence, MeanOverLabelPixels) {
    PoseInstanceMap heat(3, 1, 2);
    heat(0, 0, 0) = 0.4;
    heat(1, 0, 0) = 0.8;
    heat(2, 0, 1) = 0.9;
    InstanceLabeling l(3, 1, 0);
    l(0, 0) = l(1, 0) = 1;
    EXPECT_DOUBLE_EQ(instance_confidence(heat, l, 1), 0.6);
    l(2, 0) = 2;
    EXPECT_DOUBLE_EQ(instance_confidence(heat, l, 2), 0.9);
    l(2, 0) = 0;
    EXPECT_EQ(instance_confidence(heat, l, 2), 0.0);
    EXPECT_THROW(instance_confidence(heat, l, 3), std::invalid_argument);
}

TEST(ScoreMapFile, RoundtripAndErrors) {
    const auto dir = testing::scratch_dir("score_file");
    ScoreMap s(3, 2, 0.25);
    s(2, 1) = 1.0;
    write_score_map(s, dir / "a.p2if");
    EXPECT_EQ(read_score_map(dir / "a.p2if"), s);
    EXPECT_EQ(std::filesystem::file_size(dir / "a.p2if"), 12u + 4u * 6u);

    std::string bytes = testing::slurp(dir / "a.p2if");
    std::ofstream(dir / "short.p2if", std::ios::binary) << bytes.substr(0, bytes.size() - 1);
    EXPECT_THROW(read_score_map(dir / "short.p2if"), CodecError);
    std::string magic = bytes;
    magic[0] = 'X';
    std::ofstream(dir / "magic.p2if", std::ios::binary) << magic;
    EXPECT_THROW(read_score_map(dir / "magic.p2if"), CodecError);
    std::string range = bytes;
    const float big = 1.5f;
    std::memcpy(range.data() + 12, &big, 4);
    std::ofstream(dir / "range.p2if", std::ios::binary) << range;
    EXPECT_THROW(read_score_map(dir / "range.p2if"), CodecError);
    EXPECT_THROW(read_score_map(dir / "missing.p2if"), CodecError);
}

TEST(ScoreMapFile, LittleEndianLayout) {
    const auto dir = testing::scratch_dir("score_layout");
    ScoreMap s(2, 1, 0.0);
    s(1, 0) = 0.5;
    write_score_map(s, dir / "s.p2if");
    const std::string b = testing::slurp(dir / "s.p2if");
    EXPECT_EQ(b.substr(0, 4), "P2IF");
    EXPECT_EQ(static_cast<unsigned char>(b[4]), 2);
    EXPECT_EQ(static_cast<unsigned char>(b[8]), 1);
    // 0.5f = 0x3F000000
    EXPECT_EQ(static_cast<unsigned char>(b[19]), 0x3F);
}

TEST(SegLogitsFile, Roundtrip) {
    const auto dir = testing::scratch_dir("logits_file");
    const SegLogits l{2, 1, {0.5, -1.25, 3.0, 2.0}};
    write_seg_logits(l, dir / "l.p2il");
    const SegLogits r = read_seg_logits(dir / "l.p2il");
    EXPECT_EQ(r.width, 2);
    EXPECT_EQ(r.values, l.values);
}

TEST(CascadeWeightsFile, ParseAndErrors) {
    const auto dir = testing::scratch_dir("weights_file");
    std::ofstream(dir / "ok.txt") << "1 2 3 4 5 6 7 8 9\n10 11 12 13 14 15 16 17\n-0.5\n";
    const CascadeWeights w = read_cascade_weights(dir / "ok.txt");
    EXPECT_EQ(w.heat_weights[16], 17.0);
    EXPECT_EQ(w.shape_weight, -0.5);
    std::ofstream(dir / "short.txt") << "1 2 3";
    EXPECT_THROW(read_cascade_weights(dir / "short.txt"), ValidationError);
    std::ofstream(dir / "junk.txt") << "1 2 x";
    EXPECT_THROW(read_cascade_weights(dir / "junk.txt"), ParseError);
}

}  // namespace
}  // namespace p2i
