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

#include "p2i/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "p2i/errors.hpp"

namespace p2i {

using nlohmann::json;

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b, "mask_iou");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a[i] != 0, y = b[i] != 0;
        inter += x && y;
        uni += x || y;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double average_precision(std::span<const Prediction> preds, const GroundTruth& gts,
                         double threshold, std::vector<std::string>* diagnostics) {
    std::size_t total_gt = 0;
    for (const auto& [id, masks] : gts)
        total_gt += masks.size();
    if (total_gt == 0) {
        if (!preds.empty() && diagnostics)
            diagnostics->push_back("no ground truth: AP is 0 for " + std::to_string(preds.size()) +
                                   " predictions");
        return 0.0;
    }
    if (preds.empty())
        return 0.0;

    std::vector<std::size_t> order(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });

    std::map<std::int64_t, std::vector<char>> matched;
    for (const auto& [id, masks] : gts)
        matched[id].assign(masks.size(), 0);

    std::vector<double> precision, recall;
    precision.reserve(preds.size());
    recall.reserve(preds.size());
    std::size_t tp = 0, fp = 0;
    for (std::size_t idx : order) {
        const Prediction& p = preds[idx];
        bool hit = false;
        auto it = gts.find(p.image_id);
        if (it != gts.end()) {
            std::vector<char>& used = matched[p.image_id];
            double best = threshold;
            int best_g = -1;
            for (std::size_t g = 0; g < it->second.size(); ++g) {
                if (used[g])
                    continue;
                const double iou = mask_iou(p.mask, it->second[g]);
                if (iou >= best && (best_g < 0 || iou > best)) {
                    best = iou;
                    best_g = static_cast<int>(g);
                }
            }
            if (best_g >= 0) {
                used[best_g] = 1;
                hit = true;
            }
        }
        hit ? ++tp : ++fp;
        precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
        recall.push_back(static_cast<double>(tp) / static_cast<double>(total_gt));
    }

    // Precision envelope: max precision at any recall to the right.
    for (std::size_t i = precision.size(); i-- > 1;)
        precision[i - 1] = std::max(precision[i - 1], precision[i]);

    // Recall points as numpy.linspace(0, 1, 101) produces them.
    constexpr int kPoints = 101;
    double sum = 0.0;
    for (int r = 0; r < kPoints; ++r) {
        const double point = r == kPoints - 1 ? 1.0 : r * 0.01;
        auto pos = std::lower_bound(recall.begin(), recall.end(), point);
        if (pos != recall.end())
            sum += precision[static_cast<std::size_t>(pos - recall.begin())];
    }
    return sum / kPoints;
}

std::vector<double> iou_thresholds(double iou_max) {
    if (iou_max < 0.5 || iou_max > 0.95 + 1e-9)
        throw std::invalid_argument("iou_max must be within [0.5, 0.95]");
    const int count = static_cast<int>(std::lround((iou_max - 0.5) / 0.05)) + 1;
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        t[i] = 0.5 + i * 0.05;
    return t;
}

EvalReport ap_range(std::span<const Prediction> preds, const GroundTruth& gts,
                    std::span<const double> thresholds) {
    if (thresholds.empty())
        throw std::invalid_argument("ap_range: no thresholds");
    EvalReport report;
    report.prediction_count = preds.size();
    for (const auto& [id, masks] : gts)
        report.ground_truth_count += masks.size();
    double sum = 0.0;
    for (double t : thresholds) {
        std::vector<std::string> diag;
        const double ap = average_precision(preds, gts, t, &diag);
        if (report.diagnostics.empty())
            report.diagnostics = std::move(diag);
        report.ap_by_threshold.emplace_back(t, ap);
        sum += ap;
    }
    report.ap_range = sum / static_cast<double>(thresholds.size());
    std::vector<std::string> diag;
    report.ap_50 = average_precision(preds, gts, 0.5, &diag);
    return report;
}

GroundTruth ground_truth_from_index(const DatasetIndex& index) {
    GroundTruth gts;
    for (const ImageRecord& img : index.images()) {
        auto& masks = gts[img.image_id];
        for (const PersonInstance& p : index.instances_of(img.image_id))
            masks.push_back(decode_mask(p.segmentation, img.width, img.height));
    }
    return gts;
}

json prediction_to_json(const Prediction& p) {
    const Rle rle = encode_rle(p.mask);
    return json{{"image_id", p.image_id},
                {"category_id", 1},
                {"segmentation", {{"size", {rle.height, rle.width}}, {"counts", rle.counts}}},
                {"score", p.score}};
}

std::vector<Prediction> predictions_from_json(const json& doc, const DatasetIndex& index) {
    if (!doc.is_array())
        throw ParseError("results document: top level is not an array");
    std::vector<Prediction> preds;
    preds.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        const std::string where = "results[" + std::to_string(i) + "]";
        if (!rec.is_object() || !rec.contains("image_id") || !rec.contains("segmentation") ||
            !rec.contains("score"))
            throw ParseError(where + ": expected image_id, segmentation and score");
        Prediction p;
        try {
            p.image_id = rec["image_id"].get<std::int64_t>();
            p.score = rec["score"].get<double>();
        } catch (const json::exception&) {
            throw ParseError(where + ": wrong field types");
        }
        if (!std::isfinite(p.score))
            throw ValidationError(where + ": non-finite score");
        const ImageRecord* img = index.find_image(p.image_id);
        if (img == nullptr)
            throw ValidationError(where + ": unknown image_id " + std::to_string(p.image_id));
        const Segmentation seg = segmentation_from_json(rec["segmentation"], where);
        try {
            p.mask = decode_mask(seg, img->width, img->height);
        } catch (const CodecError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        preds.push_back(std::move(p));
    }
    return preds;
}

json report_to_json(const EvalReport& report) {
    json per = json::array();
    for (const auto& [t, ap] : report.ap_by_threshold)
        per.push_back({{"iou", std::round(t * 100.0) / 100.0}, {"ap", ap}});
    return json{{"ap_50", report.ap_50},
                {"ap_range", report.ap_range},
                {"ap_by_threshold", per},
                {"predictions", report.prediction_count},
                {"ground_truth", report.ground_truth_count},
                {"diagnostics", report.diagnostics}};
}

std::string format_report(const EvalReport& report) {
    std::ostringstream os;
    char line[96];
    os << "IoU    AP\n";
    for (const auto& [t, ap] : report.ap_by_threshold) {
        std::snprintf(line, sizeof line, "%.2f   %.5f\n", t, ap);
        os << line;
    }
    const double lo = report.ap_by_threshold.front().first;
    const double hi = report.ap_by_threshold.back().first;
    std::snprintf(line, sizeof line, "AP@0.50          %.5f\nAP@[%.2f:%.2f]   %.5f\n",
                  report.ap_50, lo, hi, report.ap_range);
    os << line;
    os << report.prediction_count << " predictions, " << report.ground_truth_count
       << " ground-truth instances\n";
    return os.str();
}

}  // namespace p2i
