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

#ifndef P2I_CLI_HPP_
#define P2I_CLI_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "p2i/eval.hpp"
#include "p2i/fusion.hpp"
#include "p2i/pipeline.hpp"

namespace p2i::cli {

namespace fs = std::filesystem;

struct IngestOptions {
    fs::path segmentation;
    fs::path keypoints;
    fs::path out;
    bool require_labeled_keypoints = false;
};

struct IngestSummary {
    std::size_t images = 0;
    std::size_t instances = 0;
};

/// Parses and intersects the two documents, then writes the index file.
/// Nothing is written when parsing fails.
IngestSummary ingest(const IngestOptions& options);

struct InferOptions {
    fs::path index;
    fs::path images_dir;
    fs::path scores_dir;
    fs::path out;
    InferMode mode = InferMode::keypoints;
    DistanceSolver solver = DistanceSolver::seeded;
    PipelineConfig config;
    int jobs = 1;
    std::optional<fs::path> cascade_weights;
};

struct InferSummary {
    std::size_t images = 0;
    std::size_t failed = 0;
    std::size_t results = 0;
};

/// Writes out/labels/<image_id>.png (16-bit), out/results.json and
/// out/manifest.json. Images are processed by up to `jobs` workers; all
/// files are written in image-id order afterwards.
InferSummary infer(const InferOptions& options, std::ostream& log);

struct EvalOptions {
    fs::path results;
    fs::path index;
    std::optional<fs::path> report;
    double iou_max = 0.95;
};

/// Evaluates a results document against the index; writes the JSON report
/// when a path is given.
EvalReport evaluate(const EvalOptions& options);

struct RenderOptions {
    fs::path labels_dir;
    fs::path images_dir;
    fs::path index;
    fs::path out;
    bool debug = false;
    PipelineConfig config;
};

/// Writes <image_id>_overlay.png for every label map; with debug, also the
/// superpixel boundaries, gradient heat map, pose-instance maps and RAG dump.
/// Returns the number of overlays written.
std::size_t render(const RenderOptions& options, std::ostream& log);

/// Label k > 0 is drawn with palette entry (k - 1) mod palette size.
Rgb palette_color(int label);
RgbImage overlay_labels(const RgbImage& image, const InstanceLabeling& labels);

fs::path image_path(const fs::path& images_dir, const ImageRecord& record);

int run(int argc, char** argv);

}  // namespace p2i::cli

#endif  // P2I_CLI_HPP_
