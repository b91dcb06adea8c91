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

#include "p2i/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "p2i/errors.hpp"
#include "p2i/image_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#ifndef P2I_VERSION
#define P2I_VERSION "dev"
#endif

namespace p2i::cli {

using nlohmann::json;

namespace {

constexpr std::array<Rgb, 20> kPalette = {{
    {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},   {245, 130, 48},
    {145, 30, 180},  {70, 240, 240},  {240, 50, 230}, {210, 245, 60},  {250, 190, 212},
    {0, 128, 128},   {220, 190, 255}, {170, 110, 40}, {255, 250, 200}, {128, 0, 0},
    {170, 255, 195}, {128, 128, 0},   {255, 215, 180}, {0, 0, 128},    {128, 128, 128},
}};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

SkeletonSpec skeleton_for(const DatasetIndex& index) {
    return index.skeleton().empty() ? SkeletonSpec::coco() : SkeletonSpec(index.skeleton());
}

json config_to_json(const PipelineConfig& c) {
    return json{{"tau", c.temperature},          {"epsilon", c.edge_epsilon},
                {"theta_bg", c.background_threshold}, {"sigma", c.heatmap_sigma},
                {"superpixels", c.superpixels},  {"compactness", c.compactness},
                {"fw_cap", c.floyd_warshall_cap}};
}

// One record per line keeps large RLE arrays diff-friendly.
std::string results_document(const std::vector<json>& records) {
    std::string out = "[";
    for (std::size_t i = 0; i < records.size(); ++i) {
        out += i == 0 ? "\n" : ",\n";
        out += records[i].dump();
    }
    out += records.empty() ? "]\n" : "\n]\n";
    return out;
}

struct ImageOutcome {
    bool ok = false;
    std::string error;
    ImageInference inference;
    double elapsed_ms = 0.0;
};

ImageOutcome infer_one(const InferOptions& opt, const ImageRecord& record,
                       std::span<const PersonInstance> people, const SkeletonSpec& skeleton,
                       const std::optional<CascadeWeights>& cascade) {
    ImageOutcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
        const fs::path score_path = opt.scores_dir / (std::to_string(record.image_id) + ".p2if");
        std::vector<std::string> notes;
        std::optional<RgbImage> image;
        if (opt.mode != InferMode::bbox || cascade) {
            image = read_image(image_path(opt.images_dir, record));
            if (image->width() != record.width || image->height() != record.height)
                throw std::runtime_error("raster size does not match the index record");
        }
        ScoreMap score;
        if (cascade) {
            const fs::path logits_path =
                opt.scores_dir / (std::to_string(record.image_id) + ".p2il");
            const SegLogits logits = read_seg_logits(logits_path);
            score = cascade_head(logits,
                                 people_heatmap(people, opt.config.heatmap_sigma, record.width,
                                                record.height),
                                 *cascade);
        } else if (opt.mode == InferMode::grid_dt && !fs::exists(score_path)) {
            score = ScoreMap(record.width, record.height, 1.0);
            notes.push_back("no score map, grid-dt prior used alone");
        } else {
            score = read_score_map(score_path);
        }
        if (score.width() != record.width || score.height() != record.height)
            throw std::runtime_error("score map size does not match the index record");

        switch (opt.mode) {
        case InferMode::keypoints:
            outcome.inference =
                infer_keypoints(*image, score, people, skeleton, opt.config, opt.solver);
            break;
        case InferMode::bbox:
            outcome.inference = infer_bbox(score, people, opt.config);
            break;
        case InferMode::grid_dt:
            outcome.inference = infer_grid_dt(*image, score, people, skeleton, opt.config);
            break;
        }
        outcome.inference.diagnostics.insert(outcome.inference.diagnostics.begin(), notes.begin(),
                                             notes.end());
        if (outcome.inference.heat.instance_count() > 65535)
            throw CapacityError("more than 65535 instances in one image");
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    outcome.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return outcome;
}

Gray16Image to_label_png(const InstanceLabeling& labels) {
    Gray16Image out(labels.width(), labels.height());
    for (std::size_t i = 0; i < labels.size(); ++i)
        out[i] = static_cast<std::uint16_t>(labels[i]);
    return out;
}

InstanceLabeling from_label_png(const Gray16Image& png) {
    InstanceLabeling labels(png.width(), png.height());
    for (std::size_t i = 0; i < png.size(); ++i)
        labels[i] = png[i];
    return labels;
}

Rgb blend(const Rgb& a, const Rgb& b) {
    auto mix = [](int x, int y) { return static_cast<std::uint8_t>((x + y + 1) / 2); };
    return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

void render_debug(const RgbImage& image, const ImageRecord& record,
                  std::span<const PersonInstance> people, const SkeletonSpec& skeleton,
                  const RenderOptions& opt) {
    const KeypointPrior kp = keypoint_prior(image, people, skeleton, opt.config);
    const std::string stem = std::to_string(record.image_id);

    RgbImage bounds = image;
    const LabelRaster& sp = kp.superpixels.labels;
    for (int y = 0; y < sp.height(); ++y)
        for (int x = 0; x < sp.width(); ++x)
            if ((x + 1 < sp.width() && sp(x + 1, y) != sp(x, y)) ||
                (y + 1 < sp.height() && sp(x, y + 1) != sp(x, y)))
                bounds(x, y) = {255, 255, 255};
    write_png(bounds, opt.out / (stem + "_superpixels.png"));

    double gmax = 0.0;
    for (double g : kp.gradients.values())
        gmax = std::max(gmax, g);
    Gray8Image grad(image.width(), image.height());
    for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] = gmax > 0.0 ? static_cast<std::uint8_t>(std::lround(255.0 * kp.gradients[i] / gmax)) : 0;
    write_png(grad, opt.out / (stem + "_gradient.png"));

    std::ofstream rag(opt.out / (stem + "_rag.txt"));
    kp.rag.write_edge_list(rag);

    if (people.empty())
        return;
    const int n = kp.prior.instance_count();
    InstanceLabeling argmax(image.width(), image.height(), 0);
    for (int i = 0; i < n; ++i) {
        Gray8Image ch(image.width(), image.height());
        for (std::size_t p = 0; p < ch.size(); ++p)
            ch[p] = static_cast<std::uint8_t>(std::lround(255.0 * kp.prior.pixel(p)[i]));
        write_png(ch, opt.out / (stem + "_prior_" + std::to_string(i + 1) + ".png"));
    }
    for (std::size_t p = 0; p < argmax.size(); ++p) {
        const auto v = kp.prior.pixel(p);
        argmax[p] = 1 + static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
    }
    RgbImage colored(image.width(), image.height());
    for (std::size_t p = 0; p < colored.size(); ++p)
        colored[p] = palette_color(argmax[p]);
    write_png(colored, opt.out / (stem + "_prior_argmax.png"));
}

}  // namespace

fs::path image_path(const fs::path& images_dir, const ImageRecord& record) {
    if (!record.file_name.empty())
        return images_dir / record.file_name;
    return images_dir / (std::to_string(record.image_id) + ".png");
}

Rgb palette_color(int label) {
    if (label <= 0)
        return {0, 0, 0};
    return kPalette[static_cast<std::size_t>(label - 1) % kPalette.size()];
}

RgbImage overlay_labels(const RgbImage& image, const InstanceLabeling& labels) {
    require_same_shape(image, labels, "overlay_labels");
    RgbImage out = image;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (labels[i] > 0)
            out[i] = blend(image[i], palette_color(labels[i]));
    return out;
}

IngestSummary ingest(const IngestOptions& opt) {
    const json seg = load_json_file(opt.segmentation);
    const json kp = load_json_file(opt.keypoints);
    ParseOptions parse;
    parse.require_labeled_keypoints = opt.require_labeled_keypoints;
    const DatasetIndex index = parse_dataset(seg, kp, parse);
    fs::path tmp = opt.out;
    tmp += ".partial";
    write_index(index, tmp);
    fs::rename(tmp, opt.out);
    return {index.images().size(), index.instances().size()};
}

InferSummary infer(const InferOptions& opt, std::ostream& log) {
    opt.config.validate();
    if (opt.jobs < 1)
        throw std::invalid_argument("--jobs must be >= 1");
    const DatasetIndex index = read_index(opt.index);
    const SkeletonSpec skeleton = skeleton_for(index);
    std::optional<CascadeWeights> cascade;
    if (opt.cascade_weights)
        cascade = read_cascade_weights(*opt.cascade_weights);

    const std::vector<ImageRecord>& images = index.images();
    std::vector<ImageOutcome> outcomes(images.size());
    const int count = static_cast<int>(images.size());
#pragma omp parallel for num_threads(opt.jobs) schedule(dynamic)
    for (int i = 0; i < count; ++i)
        outcomes[i] = infer_one(opt, images[i], index.instances_of(images[i].image_id), skeleton,
                                cascade);

    fs::create_directories(opt.out / "labels");
    InferSummary summary;
    summary.images = images.size();
    std::vector<json> records;
    json per_image = json::array();
    for (std::size_t i = 0; i < images.size(); ++i) {
        const ImageRecord& rec = images[i];
        const ImageOutcome& o = outcomes[i];
        json entry{{"image_id", rec.image_id}, {"elapsed_ms", o.elapsed_ms}};
        if (!o.ok) {
            ++summary.failed;
            entry["status"] = "error";
            entry["error"] = o.error;
            log << "image " << rec.image_id << ": " << o.error << '\n';
            per_image.push_back(entry);
            continue;
        }
        const ImageInference& inf = o.inference;
        write_png(to_label_png(inf.labels), opt.out / "labels" / (std::to_string(rec.image_id) + ".png"));
        for (int k = 1; k <= inf.heat.instance_count(); ++k) {
            Prediction p{rec.image_id, instance_mask(inf.labels, k), inf.confidences[k - 1]};
            if (mask_area(p.mask) == 0)
                continue;
            records.push_back(prediction_to_json(p));
        }
        for (const std::string& d : inf.diagnostics)
            log << "image " << rec.image_id << ": " << d << '\n';
        entry["status"] = "ok";
        entry["instances"] = inf.heat.instance_count();
        entry["superpixels"] = inf.superpixel_count;
        entry["diagnostics"] = inf.diagnostics;
        per_image.push_back(entry);
    }
    summary.results = records.size();
    write_text(opt.out / "results.json", results_document(records));

    json inputs{{"index", opt.index.string()},
                {"images_dir", opt.images_dir.string()},
                {"scores_dir", opt.scores_dir.string()}};
    if (opt.cascade_weights)
        inputs["cascade_weights"] = opt.cascade_weights->string();
    const json manifest{{"tool", "p2i"},
                        {"version", P2I_VERSION},
                        {"mode", to_string(opt.mode)},
                        {"solver", to_string(opt.solver)},
                        {"jobs", opt.jobs},
                        {"config", config_to_json(opt.config)},
                        {"inputs", inputs},
                        {"outputs", {{"labels", "labels"}, {"results", "results.json"}}},
                        {"images", per_image}};
    write_text(opt.out / "manifest.json", manifest.dump(2) + "\n");
    return summary;
}

EvalReport evaluate(const EvalOptions& opt) {
    const DatasetIndex index = read_index(opt.index);
    const std::vector<Prediction> preds = predictions_from_json(load_json_file(opt.results), index);
    const std::vector<double> thresholds = iou_thresholds(opt.iou_max);
    EvalReport report = ap_range(preds, ground_truth_from_index(index), thresholds);
    if (opt.report)
        write_text(*opt.report, report_to_json(report).dump(2) + "\n");
    return report;
}

std::size_t render(const RenderOptions& opt, std::ostream& log) {
    const DatasetIndex index = read_index(opt.index);
    const SkeletonSpec skeleton = skeleton_for(index);
    fs::create_directories(opt.out);
    std::size_t written = 0;
    for (const ImageRecord& rec : index.images()) {
        const fs::path label_path = opt.labels_dir / (std::to_string(rec.image_id) + ".png");
        const RgbImage image = read_image(image_path(opt.images_dir, rec));
        if (fs::exists(label_path)) {
            const InstanceLabeling labels = from_label_png(read_png_gray16(label_path));
            if (!image.same_shape(labels)) {
                log << "warning: " << label_path.string() << " does not match the image size, skipped\n";
            } else {
                write_png(overlay_labels(image, labels),
                          opt.out / (std::to_string(rec.image_id) + "_overlay.png"));
                ++written;
            }
        }
        if (opt.debug)
            render_debug(image, rec, index.instances_of(rec.image_id), skeleton, opt);
    }
    return written;
}

namespace {

void add_config_flags(CLI::App* cmd, PipelineConfig& c) {
    cmd->add_option("--tau", c.temperature, "Softmax temperature")->capture_default_str();
    cmd->add_option("--theta-bg", c.background_threshold, "Background score threshold")
        ->capture_default_str();
    cmd->add_option("--epsilon", c.edge_epsilon, "Edge weight floor")->capture_default_str();
    cmd->add_option("--superpixels", c.superpixels, "SLIC target superpixel count")
        ->capture_default_str();
    cmd->add_option("--compactness", c.compactness, "SLIC compactness")->capture_default_str();
    cmd->add_option("--sigma", c.heatmap_sigma, "Keypoint heatmap spread (pixels)")
        ->capture_default_str();
    cmd->add_option("--fw-cap", c.floyd_warshall_cap, "Floyd-Warshall node cap")
        ->capture_default_str();
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Keypoint-prior person instance segmentation"};
    app.set_version_flag("--version", P2I_VERSION);
    app.require_subcommand(1);

    IngestOptions ingest_opt;
    auto* ingest_cmd = app.add_subcommand("ingest", "Intersect COCO instances and keypoints documents");
    ingest_cmd->add_option("--instances", ingest_opt.segmentation, "COCO instances JSON")->required();
    ingest_cmd->add_option("--keypoints", ingest_opt.keypoints, "COCO person_keypoints JSON")->required();
    ingest_cmd->add_option("--out", ingest_opt.out, "Index file to write")->required();
    ingest_cmd->add_flag("--require-labeled-keypoints", ingest_opt.require_labeled_keypoints,
                         "Drop instances whose joints are all unlabeled");

    InferOptions infer_opt;
    std::string mode = "keypoints", solver = "seeded", cascade;
    auto* infer_cmd = app.add_subcommand("infer", "Produce instance labelings and a results document");
    infer_cmd->add_option("--index", infer_opt.index, "Index file from ingest")->required();
    infer_cmd->add_option("--images", infer_opt.images_dir, "Directory of image rasters")->required();
    infer_cmd->add_option("--scores", infer_opt.scores_dir, "Directory of <image_id>.p2if score maps")
        ->required();
    infer_cmd->add_option("--out", infer_opt.out, "Output directory")->required();
    infer_cmd->add_option("--mode", mode, "keypoints | bbox | grid-dt")
        ->check(CLI::IsMember({"keypoints", "bbox", "grid-dt"}))
        ->capture_default_str();
    infer_cmd->add_option("--solver", solver, "Graph distance solver: seeded | floyd-warshall")
        ->check(CLI::IsMember({"seeded", "floyd-warshall"}))
        ->capture_default_str();
    infer_cmd->add_option("--jobs", infer_opt.jobs, "Parallel image workers")->capture_default_str();
    infer_cmd->add_option("--cascade-weights", cascade,
                          "18 cascade weights; replaces score maps with the cascade output over "
                          "<image_id>.p2il logits");
    add_config_flags(infer_cmd, infer_opt.config);

    EvalOptions eval_opt;
    std::string report_path;
    auto* eval_cmd = app.add_subcommand("eval", "Average precision of a results document");
    eval_cmd->add_option("--results", eval_opt.results, "Results document")->required();
    eval_cmd->add_option("--index", eval_opt.index, "Index file from ingest")->required();
    eval_cmd->add_option("--iou-max", eval_opt.iou_max, "Upper end of the IoU range")
        ->check(CLI::IsMember({0.9, 0.95}))
        ->capture_default_str();
    eval_cmd->add_option("--report", report_path, "Where to write the JSON report");

    RenderOptions render_opt;
    auto* render_cmd = app.add_subcommand("render", "Color overlays of label maps");
    render_cmd->add_option("--labels", render_opt.labels_dir, "Directory of label PNGs")->required();
    render_cmd->add_option("--images", render_opt.images_dir, "Directory of image rasters")->required();
    render_cmd->add_option("--index", render_opt.index, "Index file from ingest")->required();
    render_cmd->add_option("--out", render_opt.out, "Output directory")->required();
    render_cmd->add_flag("--debug", render_opt.debug,
                         "Also write superpixels, gradients, pose-instance maps and the RAG");
    add_config_flags(render_cmd, render_opt.config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest_cmd) {
            const IngestSummary s = ingest(ingest_opt);
            std::cout << s.images << " images, " << s.instances << " instances\n";
            return 0;
        }
        if (*infer_cmd) {
            infer_opt.mode = mode == "bbox"      ? InferMode::bbox
                             : mode == "grid-dt" ? InferMode::grid_dt
                                                 : InferMode::keypoints;
            infer_opt.solver =
                solver == "floyd-warshall" ? DistanceSolver::floyd_warshall : DistanceSolver::seeded;
            if (!cascade.empty())
                infer_opt.cascade_weights = cascade;
            const InferSummary s = infer(infer_opt, std::cerr);
            std::cout << s.images - s.failed << "/" << s.images << " images, " << s.results
                      << " results\n";
            return (s.images > 0 && s.failed == s.images) ? 1 : 0;
        }
        if (*eval_cmd) {
            eval_opt.report = report_path.empty()
                                  ? eval_opt.results.parent_path() / "report.json"
                                  : fs::path(report_path);
            const EvalReport r = evaluate(eval_opt);
            std::cout << format_report(r);
            for (const std::string& d : r.diagnostics)
                std::cerr << d << '\n';
            return 0;
        }
        if (*render_cmd) {
            const std::size_t n = render(render_opt, std::cerr);
            std::cout << n << " overlays written\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace p2i::cli
