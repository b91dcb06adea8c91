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

#ifndef P2I_FUSION_HPP_
#define P2I_FUSION_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "p2i/annotations.hpp"
#include "p2i/graph.hpp"
#include "p2i/imageops.hpp"
#include "p2i/pose_prior.hpp"

namespace p2i {

/// Per-pixel person probability in [0, 1].
using ScoreMap = Raster<double, struct ScoreTag>;
/// 0 = background, 1..n = instance.
using InstanceLabeling = Raster<std::int32_t, struct InstanceLabelTag>;

/// prior x score; same layout as PoseInstanceMap, values in [0, 1].
using InstanceHeatmap = PoseInstanceMap;

/// Two-class segmentation logits, pixel-major (background, person).
struct SegLogits {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double background(std::size_t p) const { return values[2 * p]; }
    double person(std::size_t p) const { return values[2 * p + 1]; }
};

/// 1x1 convolution over the 17 heatmap channels plus the weight of the
/// resulting shape channel on the person logit.
struct CascadeWeights {
    std::array<double, kNumJoints> heat_weights{};
    double shape_weight = 0.0;
};

struct PipelineConfig {
    double temperature = kDefaultTemperature;
    double edge_epsilon = kDefaultEdgeEpsilon;
    double background_threshold = 0.5;
    double heatmap_sigma = 6.0;
    int superpixels = 1000;
    double compactness = 10.0;
    int floyd_warshall_cap = kDefaultFloydWarshallCap;

    /// Throws std::invalid_argument when a parameter is out of range.
    void validate() const;
};

// P2IF score map file: "P2IF", u32 width, u32 height, then h*w float32
// row-major, all little-endian.
ScoreMap read_score_map(const std::filesystem::path& path);
void write_score_map(const ScoreMap& score, const std::filesystem::path& path);

// P2IL logits file: "P2IL", u32 width, u32 height, then h*w pairs of
// float32 (background, person) row-major, little-endian.
SegLogits read_seg_logits(const std::filesystem::path& path);
void write_seg_logits(const SegLogits& logits, const std::filesystem::path& path);

/// 18 whitespace-separated reals: 17 heatmap weights, then the shape weight.
CascadeWeights read_cascade_weights(const std::filesystem::path& path);

InstanceHeatmap fuse(const PoseInstanceMap& prior, const ScoreMap& score);

/// 0 where score < threshold, else 1 + argmax_i heat_i (lowest index wins ties).
InstanceLabeling label_instances(const InstanceHeatmap& heat, const ScoreMap& score,
                                 double background_threshold);

/// Pixel (x, y) is inside a box when its center (x+0.5, y+0.5) lies in
/// [x0, x0+w) x [y0, y0+h). Overlaps go to the smallest-area box, then the
/// lowest index.
InstanceLabeling bbox_baseline(const ScoreMap& score, std::span<const BBox> boxes,
                               double background_threshold);

/// Sweep-ordered relaxation on the 8-neighbor grid graph with edge cost
/// ((eps + c(p)) + (eps + c(q))) / 2 times 1 (axial) or sqrt(2) (diagonal),
/// repeated over the four sweep orders until nothing changes.
std::vector<double> grid_fast_sweeping(const GradientMap& cost, std::span<const Pixel> seeds,
                                       double epsilon);

/// Stable two-class softmax evaluated at the person class.
double person_probability(double background_logit, double person_logit);

ScoreMap cascade_head(const SegLogits& logits, const KeypointHeatmap& heat,
                      const CascadeWeights& weights);

/// Mean of heat_{label-1} over the pixels carrying label; 0 if none.
double instance_confidence(const InstanceHeatmap& heat, const InstanceLabeling& labeling,
                           int label);

/// Binary mask of the pixels carrying label.
BinaryMask instance_mask(const InstanceLabeling& labeling, int label);

}  // namespace p2i

#endif  // P2I_FUSION_HPP_
