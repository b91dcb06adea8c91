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

#ifndef P2I_PIPELINE_HPP_
#define P2I_PIPELINE_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "p2i/annotations.hpp"
#include "p2i/fusion.hpp"
#include "p2i/graph.hpp"
#include "p2i/imageops.hpp"
#include "p2i/pose_prior.hpp"

namespace p2i {

enum class InferMode { keypoints, bbox, grid_dt };
enum class DistanceSolver { seeded, floyd_warshall };

const char* to_string(InferMode mode);
const char* to_string(DistanceSolver solver);

/// Everything one image produces. heat has one channel per instance;
/// confidences[i] belongs to label i + 1.
struct ImageInference {
    InstanceLabeling labels;
    InstanceHeatmap heat;
    std::vector<double> confidences;
    std::vector<std::string> diagnostics;
    int superpixel_count = 0;
};

/// Intermediate products of the superpixel prior, exposed for rendering.
struct KeypointPrior {
    SuperpixelLabeling superpixels;
    GradientMap gradients;
    Rag rag;
    std::vector<DistanceField> fields;
    PoseInstanceMap prior;
    std::vector<std::string> diagnostics;
};

/// Superpixels, RAG, per-instance skeleton seeds and geodesic distances, and
/// the softmax prior. Instances without any labeled joint get an all-+inf
/// field (uniform where every instance is unreachable) and a diagnostic.
KeypointPrior keypoint_prior(const RgbImage& image, std::span<const PersonInstance> people,
                             const SkeletonSpec& skeleton, const PipelineConfig& config,
                             DistanceSolver solver = DistanceSolver::seeded);

ImageInference infer_keypoints(const RgbImage& image, const ScoreMap& score,
                               std::span<const PersonInstance> people, const SkeletonSpec& skeleton,
                               const PipelineConfig& config,
                               DistanceSolver solver = DistanceSolver::seeded);

/// Box baseline; the heat of instance i is the score inside box i.
ImageInference infer_bbox(const ScoreMap& score, std::span<const PersonInstance> people,
                          const PipelineConfig& config);

/// Pixel-grid variant: per-instance fast-sweeping distances from the
/// skeleton pixels over the Sobel cost, then the same softmax and fusion.
ImageInference infer_grid_dt(const RgbImage& image, const ScoreMap& score,
                             std::span<const PersonInstance> people, const SkeletonSpec& skeleton,
                             const PipelineConfig& config);

/// Channel-wise max of the oracle keypoint heatmaps of every person.
KeypointHeatmap people_heatmap(std::span<const PersonInstance> people, double sigma, int width,
                               int height);

}  // namespace p2i

#endif  // P2I_PIPELINE_HPP_
