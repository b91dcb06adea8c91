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

#ifndef P2I_EVAL_HPP_
#define P2I_EVAL_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "p2i/annotations.hpp"

namespace p2i {

struct Prediction {
    std::int64_t image_id = 0;
    BinaryMask mask;
    double score = 0.0;
};

using GroundTruth = std::map<std::int64_t, std::vector<BinaryMask>>;

struct EvalReport {
    std::vector<std::pair<double, double>> ap_by_threshold;  // (IoU threshold, AP)
    double ap_50 = 0.0;
    double ap_range = 0.0;
    std::size_t prediction_count = 0;
    std::size_t ground_truth_count = 0;
    std::vector<std::string> diagnostics;
};

/// |a & b| / |a | b|, 0 when both are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

/// COCO-style AP at one IoU threshold: predictions in descending score
/// order (stable), each greedily matched to the unmatched ground truth of
/// its image with the highest IoU >= threshold, precision interpolated at
/// the 101 recall points 0, 0.01, ..., 1.
double average_precision(std::span<const Prediction> preds, const GroundTruth& gts,
                         double threshold, std::vector<std::string>* diagnostics = nullptr);

/// Thresholds 0.50, 0.55, ..., iou_max.
std::vector<double> iou_thresholds(double iou_max = 0.95);

EvalReport ap_range(std::span<const Prediction> preds, const GroundTruth& gts,
                    std::span<const double> thresholds);

/// Ground-truth masks of every instance in the index, keyed by image.
GroundTruth ground_truth_from_index(const DatasetIndex& index);

/// Results records {image_id, category_id, segmentation: {size, counts}, score}.
nlohmann::json prediction_to_json(const Prediction& p);
/// Throws ValidationError naming the id when a record references an image
/// missing from the index.
std::vector<Prediction> predictions_from_json(const nlohmann::json& doc, const DatasetIndex& index);

nlohmann::json report_to_json(const EvalReport& report);
std::string format_report(const EvalReport& report);

}  // namespace p2i

#endif  // P2I_EVAL_HPP_
