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

#include "p2i/pipeline.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace p2i {

const char* to_string(InferMode mode) {
    switch (mode) {
    case InferMode::keypoints:
        return "keypoints";
    case InferMode::bbox:
        return "bbox";
    case InferMode::grid_dt:
        return "grid-dt";
    }
    return "?";
}

const char* to_string(DistanceSolver solver) {
    return solver == DistanceSolver::seeded ? "seeded" : "floyd-warshall";
}

namespace {

void require_score_shape(const RgbImage& image, const ScoreMap& score) {
    if (!image.same_shape(score))
        throw std::invalid_argument("score map is " + std::to_string(score.width()) + "x" +
                                    std::to_string(score.height()) + " but the image is " +
                                    std::to_string(image.width()) + "x" +
                                    std::to_string(image.height()));
}

std::string no_seed_message(const PersonInstance& p) {
    return "instance " + std::to_string(p.instance_id) +
           ": no labeled keypoints, uniform prior fallback";
}

ImageInference finish(const PoseInstanceMap& prior, const ScoreMap& score,
                      const PipelineConfig& config) {
    ImageInference out;
    out.heat = fuse(prior, score);
    out.labels = label_instances(out.heat, score, config.background_threshold);
    for (int i = 1; i <= out.heat.instance_count(); ++i)
        out.confidences.push_back(instance_confidence(out.heat, out.labels, i));
    return out;
}

ImageInference empty_inference(const ScoreMap& score) {
    ImageInference out;
    out.labels = InstanceLabeling(score.width(), score.height(), 0);
    out.heat = InstanceHeatmap(score.width(), score.height(), 0);
    return out;
}

}  // namespace

KeypointPrior keypoint_prior(const RgbImage& image, std::span<const PersonInstance> people,
                             const SkeletonSpec& skeleton, const PipelineConfig& config,
                             DistanceSolver solver) {
    config.validate();
    KeypointPrior kp;
    kp.gradients = sobel_magnitude(to_gray(image));
    const int target = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(config.superpixels), image.size()));
    kp.superpixels = slic(image, {target, config.compactness, 10});
    kp.rag = build_rag(kp.superpixels, kp.gradients, config.edge_epsilon);
    if (people.empty())
        return kp;

    const int n = static_cast<int>(people.size());
    std::vector<std::vector<int>> seeds(people.size());
    for (int i = 0; i < n; ++i)
        seeds[i] = seeds_from_skeleton(
            rasterize_skeleton(people[i].keypoints, skeleton, image.width(), image.height()),
            kp.superpixels);

    kp.fields.assign(people.size(),
                     DistanceField(static_cast<std::size_t>(kp.superpixels.count), kInfinity));
    if (solver == DistanceSolver::floyd_warshall) {
        const DistanceTable table = floyd_warshall(kp.rag, config.floyd_warshall_cap);
        for (int i = 0; i < n; ++i)
            if (!seeds[i].empty())
                kp.fields[i] = reduce_seed_rows(table, seeds[i]);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i)
            if (!seeds[i].empty())
                kp.fields[i] = seeded_distance(kp.rag, seeds[i]);
    }
    for (int i = 0; i < n; ++i)
        if (seeds[i].empty())
            kp.diagnostics.push_back(no_seed_message(people[i]));
    kp.prior = pose_instance_map(kp.fields, kp.superpixels, config.temperature);
    return kp;
}

ImageInference infer_keypoints(const RgbImage& image, const ScoreMap& score,
                               std::span<const PersonInstance> people, const SkeletonSpec& skeleton,
                               const PipelineConfig& config, DistanceSolver solver) {
    require_score_shape(image, score);
    KeypointPrior kp = keypoint_prior(image, people, skeleton, config, solver);
    ImageInference out = people.empty() ? empty_inference(score) : finish(kp.prior, score, config);
    out.superpixel_count = kp.superpixels.count;
    out.diagnostics = std::move(kp.diagnostics);
    return out;
}

ImageInference infer_bbox(const ScoreMap& score, std::span<const PersonInstance> people,
                          const PipelineConfig& config) {
    config.validate();
    std::vector<BBox> boxes;
    for (const PersonInstance& p : people)
        boxes.push_back(p.bbox);
    ImageInference out;
    out.labels = bbox_baseline(score, boxes, config.background_threshold);
    out.heat = InstanceHeatmap(score.width(), score.height(), static_cast<int>(boxes.size()));
    for (int y = 0; y < score.height(); ++y) {
        for (int x = 0; x < score.width(); ++x) {
            for (std::size_t i = 0; i < boxes.size(); ++i) {
                const BBox& b = boxes[i];
                const double cx = x + 0.5, cy = y + 0.5;
                if (cx >= b.x && cx < b.x + b.w && cy >= b.y && cy < b.y + b.h)
                    out.heat(x, y, static_cast<int>(i)) = score(x, y);
            }
        }
    }
    for (int i = 1; i <= static_cast<int>(boxes.size()); ++i)
        out.confidences.push_back(instance_confidence(out.heat, out.labels, i));
    return out;
}

ImageInference infer_grid_dt(const RgbImage& image, const ScoreMap& score,
                             std::span<const PersonInstance> people, const SkeletonSpec& skeleton,
                             const PipelineConfig& config) {
    config.validate();
    require_score_shape(image, score);
    if (people.empty())
        return empty_inference(score);
    const GradientMap cost = sobel_magnitude(to_gray(image));
    const int n = static_cast<int>(people.size());
    std::vector<DistanceField> fields(people.size(), DistanceField(image.size(), kInfinity));
    std::vector<char> seeded(people.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const std::vector<Pixel> pixels =
            rasterize_skeleton(people[i].keypoints, skeleton, image.width(), image.height());
        if (pixels.empty())
            continue;
        fields[i] = grid_fast_sweeping(cost, pixels, config.edge_epsilon);
        seeded[i] = 1;
    }
    const PoseInstanceMap prior =
        pose_instance_map_from_pixels(fields, image.width(), image.height(), config.temperature);
    ImageInference out = finish(prior, score, config);
    for (int i = 0; i < n; ++i)
        if (!seeded[i])
            out.diagnostics.push_back(no_seed_message(people[i]));
    return out;
}

KeypointHeatmap people_heatmap(std::span<const PersonInstance> people, double sigma, int width,
                               int height) {
    if (people.empty())
        return render_keypoint_heatmaps(KeypointSet{}, sigma, width, height);
    std::vector<KeypointHeatmap> maps;
    maps.reserve(people.size());
    for (const PersonInstance& p : people)
        maps.push_back(render_keypoint_heatmaps(p.keypoints, sigma, width, height));
    return merge_heatmaps(maps);
}

}  // namespace p2i
