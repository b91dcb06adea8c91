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


// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "p2i/cli.hpp"
#include "p2i/errors.hpp"
#include "p2i/image_io.hpp"
#include "test_support.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace p2i;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(bool ok, const char* id, const std::string& what) {
    std::printf("[%s] %s %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Runs a criterion; an escaped exception counts as a failure.
void check(const char* id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(false, id, std::string("threw: ") + e.what());
    }
}

cli::InferOptions fixture_infer(const std::filesystem::path& index, const std::filesystem::path& out,
                                InferMode mode) {
    cli::InferOptions opt;
    opt.index = index;
    opt.images_dir = testing::fixture_dir() / "images";
    opt.scores_dir = testing::fixture_dir() / "scores";
    opt.out = out;
    opt.mode = mode;
    return opt;
}

std::filesystem::path ingest_fixture(const std::filesystem::path& dir) {
    cli::IngestOptions opt;
    opt.segmentation = testing::fixture_dir() / "instances.json";
    opt.keypoints = testing::fixture_dir() / "person_keypoints.json";
    opt.out = dir / "index.json";
    cli::ingest(opt);
    return opt.out;
}

void ac1() {
    std::printf("[INFO] AC1 absolute AP on full COCO is not reproduced: it needs a trained person "
                "segmentation network and the full dataset. AC2-AC11 substitute fixture-scale and "
                "property checks.\n");
}

void ac2() {
    const auto start = Clock::now();
    const auto dir = testing::scratch_dir("acceptance_ac2");
    const auto index = ingest_fixture(dir);
    std::ostringstream log;
    cli::infer(fixture_infer(index, dir / "kp", InferMode::keypoints), log);
    cli::infer(fixture_infer(index, dir / "bbox", InferMode::bbox), log);
    const double kp = cli::evaluate({dir / "kp" / "results.json", index, {}, 0.95}).ap_50;
    const double box = cli::evaluate({dir / "bbox" / "results.json", index, {}, 0.95}).ap_50;
    const double elapsed = seconds_since(start);
    const auto scenes = read_index(index).images().size();
    report(scenes >= 3 && kp >= 1.05 * box && elapsed < 30.0, "AC2",
           fmt("fixture (%zu scenes): keypoints AP@0.5 %.5f vs bbox %.5f, ratio %.4f (need >= 1.05), "
               "%.2f s",
               scenes, kp, box, box > 0 ? kp / box : INFINITY, elapsed));
}

void ac3() {
    const auto start = Clock::now();
    std::mt19937 rng(3003);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const int n = std::uniform_int_distribution<int>(1, 30)(rng);
        const Rag g = testing::random_connected_graph(n, rng);
        std::vector<int> seeds;
        for (int v = 0; v < n; ++v)
            if (std::bernoulli_distribution(0.15)(rng))
                seeds.push_back(v);
        if (seeds.empty())
            seeds.push_back(std::uniform_int_distribution<int>(0, n - 1)(rng));
        const DistanceField a = seeded_distance(g, seeds);
        const DistanceField b = reduce_seed_rows(floyd_warshall(g), seeds);
        for (int v = 0; v < n; ++v)
            worst = std::max(worst, std::abs(a[v] - b[v]));
    }
    const double elapsed = seconds_since(start);
    report(worst <= 1e-12 && elapsed < 10.0, "AC3",
           fmt("seeded vs Floyd-Warshall on 500 random graphs: max |diff| %.3g, %.2f s", worst,
               elapsed));
}

void ac4() {
    const auto start = Clock::now();
    std::mt19937 rng(4004);
    std::uniform_real_distribution<double> c(0.0, 4.0);
    std::uniform_int_distribution<int> coord(0, 11);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        GradientMap cost(12, 12);
        for (double& v : cost.values())
            v = c(rng);
        std::vector<Pixel> seeds;
        const int k = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int s = 0; s < k; ++s)
            seeds.push_back({coord(rng), coord(rng)});
        const auto a = grid_fast_sweeping(cost, seeds, kDefaultEdgeEpsilon);
        const auto b = testing::grid_dijkstra(cost, seeds, kDefaultEdgeEpsilon);
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    const double elapsed = seconds_since(start);
    report(worst <= 1e-9 && elapsed < 10.0, "AC4",
           fmt("fast sweeping vs best-first on 200 12x12 grids: max |diff| %.3g, %.2f s", worst,
               elapsed));
}

void ac5() {
    const DatasetIndex index = parse_dataset(
        load_json_file(testing::fixture_dir() / "instances.json"),
        load_json_file(testing::fixture_dir() / "person_keypoints.json"));
    const SkeletonSpec skeleton(index.skeleton());
    double worst_sum = 0.0;
    for (const ImageRecord& rec : index.images()) {
        const RgbImage img = read_image(testing::fixture_dir() / "images" / rec.file_name);
        const KeypointPrior kp = keypoint_prior(img, index.instances_of(rec.image_id), skeleton, {});
        for (std::size_t p = 0; p < img.size(); ++p) {
            double sum = 0.0;
            for (double v : kp.prior.pixel(p))
                sum += v;
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
    }

    std::mt19937 rng(5005);
    std::uniform_real_distribution<double> d(0.0, 100.0), scale(1e-3, 1e3);
    int monotone_violations = 0, argmax_violations = 0;
    for (int t = 0; t < 1000; ++t) {
        const int n = std::uniform_int_distribution<int>(2, 8)(rng);
        const double s = scale(rng);
        std::vector<DistanceField> f(n), g(n);
        for (int i = 0; i < n; ++i) {
            f[i] = {std::bernoulli_distribution(0.05)(rng) ? kInfinity : d(rng)};
            g[i] = {f[i][0] * s};
        }
        const auto p = softmax_prior(f, kDefaultTemperature);
        const auto q = softmax_prior(g, kDefaultTemperature);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if ((f[i][0] < f[j][0] && p[i] < p[j]) || (f[i][0] == f[j][0] && p[i] != p[j]))
                    ++monotone_violations;
        if (std::max_element(p.begin(), p.end()) - p.begin() !=
            std::max_element(q.begin(), q.end()) - q.begin())
            ++argmax_violations;
    }
    report(worst_sum <= 1e-6 && monotone_violations == 0 && argmax_violations == 0, "AC5",
           fmt("prior normalization max |sum-1| %.3g on %zu fixture images; 1000 tuples: %d "
               "monotonicity and %d argmax scale-invariance violations",
               worst_sum, index.images().size(), monotone_violations, argmax_violations));
}

void ac6() {
    std::mt19937 rng(6006);
    int mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        const int w = std::uniform_int_distribution<int>(1, 16)(rng);
        const int h = std::uniform_int_distribution<int>(1, 16)(rng);
        const double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const BinaryMask m = testing::random_mask(w, h, density, rng);
        if (!(decode_rle(encode_rle(m)) == m))
            ++mismatches;
    }
    report(mismatches == 0, "AC6", fmt("RLE roundtrip on 1000 random masks: %d mismatches", mismatches));
}

BinaryMask rect(int w, int h, int x0, int y0, int x1, int y1) {
    BinaryMask m(w, h, 0);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            m(x, y) = 1;
    return m;
}

void ac7() {
    const BinaryMask g0 = rect(10, 10, 0, 0, 4, 4), g1 = rect(10, 10, 6, 6, 10, 10);
    const GroundTruth two{{1, {g0, g1}}};
    const std::vector<Prediction> preds{
        {1, g0, 0.9}, {1, rect(10, 10, 0, 6, 3, 9), 0.8}, {1, g1, 0.7}};
    const double hand = average_precision(preds, two, 0.5);

    const DatasetIndex index = parse_dataset(
        load_json_file(testing::fixture_dir() / "instances.json"),
        load_json_file(testing::fixture_dir() / "person_keypoints.json"));
    const GroundTruth gts = ground_truth_from_index(index);
    std::vector<Prediction> self;
    for (const auto& [id, masks] : gts)
        for (const BinaryMask& m : masks)
            self.push_back({id, m, 1.0});
    const EvalReport self_report = ap_range(self, gts, iou_thresholds());
    bool self_ok = self_report.ap_range == 1.0;
    for (const auto& [t, ap] : self_report.ap_by_threshold)
        self_ok = self_ok && ap == 1.0;

    std::mt19937 rng(7007);
    int increases = 0;
    for (int c = 0; c < 100; ++c) {
        GroundTruth g;
        std::vector<Prediction> p;
        const int images = std::uniform_int_distribution<int>(1, 4)(rng);
        for (std::int64_t img = 1; img <= images; ++img) {
            const int k = std::uniform_int_distribution<int>(0, 4)(rng);
            g[img];
            for (int i = 0; i < k; ++i) {
                g[img].push_back(testing::random_mask(10, 10, 0.35, rng));
                BinaryMask noisy = g[img].back();
                const double flip = std::uniform_real_distribution<double>(0.0, 0.4)(rng);
                for (auto& v : noisy.values())
                    if (std::bernoulli_distribution(flip)(rng))
                        v ^= 1;
                p.push_back({img, noisy, std::uniform_real_distribution<double>(0, 1)(rng)});
            }
            if (std::bernoulli_distribution(0.5)(rng))
                p.push_back({img, testing::random_mask(10, 10, 0.3, rng), 0.5});
        }
        const EvalReport r = ap_range(p, g, iou_thresholds());
        for (std::size_t i = 1; i < r.ap_by_threshold.size(); ++i)
            if (r.ap_by_threshold[i].second > r.ap_by_threshold[i - 1].second)
                ++increases;
    }
    report(std::abs(hand - 0.83498) <= 1e-5 && self_ok && increases == 0, "AC7",
           fmt("hand case AP@0.5 %.6f (target 0.83498 +/- 1e-5); self-match %s; %d threshold "
               "increases over 100 random cases",
               hand, self_ok ? "1.0 at every threshold" : "NOT 1.0", increases));
}

void ac8() {
    std::mt19937 rng(8008);
    std::normal_distribution<double> n(0.0, 4.0);
    const int w = 40, h = 30;
    SegLogits logits{w, h, std::vector<double>(2 * w * h)};
    for (double& v : logits.values)
        v = n(rng);
    KeypointSet kp{};
    for (int k = 0; k < kNumJoints; ++k)
        kp[k] = {std::uniform_real_distribution<double>(0, w - 1)(rng),
                 std::uniform_real_distribution<double>(0, h - 1)(rng), 2};
    const KeypointHeatmap heat = render_keypoint_heatmaps(kp, 6.0, w, h);
    const ScoreMap s = cascade_head(logits, heat, CascadeWeights{});
    int differing = 0;
    for (std::size_t p = 0; p < s.size(); ++p)
        if (s[p] != person_probability(logits.background(p), logits.person(p)))
            ++differing;

    SegLogits one{1, 1, {0.0, 0.0}};
    KeypointSet j{};
    j[0] = {0, 0, 2};
    CascadeWeights weights;
    weights.heat_weights[0] = 1.0;
    weights.shape_weight = 2.0;
    const double hand = cascade_head(one, render_keypoint_heatmaps(j, 1.0, 1, 1), weights)[0];
    report(differing == 0 && std::abs(hand - 0.88080) <= 1e-5, "AC8",
           fmt("zero weights: %d of %zu pixels differ from the plain softmax; hand example %.6f "
               "(target 0.88080 +/- 1e-5)",
               differing, s.size(), hand));
}

void ac9() {
    GrayImage v(9, 7, 0.0), hz(7, 9, 0.0);
    for (int y = 0; y < 7; ++y)
        for (int x = 4; x < 9; ++x)
            v(x, y) = 1.0;
    for (int y = 4; y < 9; ++y)
        for (int x = 0; x < 7; ++x)
            hz(x, y) = 1.0;
    const GradientMap gv = sobel_magnitude(v), gh = sobel_magnitude(hz);
    bool ok = true;
    for (int y = 1; y < 6; ++y)
        ok = ok && gv(3, y) == 4.0 && gv(4, y) == 4.0 && gv(1, y) == 0.0;
    for (int x = 1; x < 6; ++x)
        ok = ok && gh(x, 3) == 4.0 && gh(x, 4) == 4.0 && gh(x, 1) == 0.0;
    report(ok, "AC9",
           fmt("unit step: vertical edge magnitude %.17g, horizontal edge %.17g (need exactly 4)",
               gv(3, 3), gh(3, 3)));
}

// Five stick figures on a textured 640x480 scene.
void ac10() {
    std::mt19937 rng(10010);
    const int w = 640, h = 480;
    RgbImage img = testing::blocky_image(w, h, rng);
    std::vector<PersonInstance> people;
    for (int i = 0; i < 5; ++i) {
        const double cx = 80 + 120 * i, top = 80 + 10 * i;
        PersonInstance p;
        p.instance_id = i + 1;
        p.image_id = 1;
        const std::array<std::pair<double, double>, kNumJoints> pose = {{
            {0, 0}, {5, -5}, {-5, -5}, {10, 0}, {-10, 0}, {30, 50}, {-30, 50}, {45, 110},
            {-45, 110}, {50, 160}, {-50, 160}, {20, 170}, {-20, 170}, {25, 250}, {-25, 250},
            {25, 320}, {-25, 320}}};
        for (int k = 0; k < kNumJoints; ++k)
            p.keypoints[k] = {cx + pose[k].first, top + pose[k].second, 2};
        p.bbox = {cx - 60, top - 20, 120, 350};
        people.push_back(p);
        for (int y = static_cast<int>(top); y < std::min(h, static_cast<int>(top + 330)); ++y)
            for (int x = static_cast<int>(cx - 40); x < static_cast<int>(cx + 40); ++x)
                img(x, y) = {static_cast<std::uint8_t>(40 * i), 90, 200};
    }
    ScoreMap score(w, h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            score(x, y) = img(x, y).g == 90 && img(x, y).b == 200 ? 0.95 : 0.05;

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    const auto start = Clock::now();
    const ImageInference r = infer_keypoints(img, score, people, SkeletonSpec::coco(), {});
    const double elapsed = seconds_since(start);
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif

    bool rejected = false;
    try {
        floyd_warshall(Rag(kDefaultFloydWarshallCap + 1, {}));
    } catch (const CapacityError&) {
        rejected = true;
    }
    bool pipeline_rejected = false;
    PipelineConfig fine;
    fine.superpixels = 4000;
    try {
        keypoint_prior(img, people, SkeletonSpec::coco(), fine, DistanceSolver::floyd_warshall);
    } catch (const CapacityError&) {
        pipeline_rejected = true;
    }
    report(elapsed < 2.0 && rejected && pipeline_rejected && r.superpixel_count > 0, "AC10",
           fmt("640x480, %d superpixels, 5 instances, 1 thread: %.3f s (need < 2 s); "
               "Floyd-Warshall above %d nodes %s",
               r.superpixel_count, elapsed, kDefaultFloydWarshallCap,
               rejected && pipeline_rejected ? "rejected" : "NOT rejected"));
}

void ac11() {
    const auto dir = testing::scratch_dir("acceptance_ac11");
    const auto index = ingest_fixture(dir);
    std::ostringstream log;
    for (const char* run : {"a", "b"}) {
        cli::InferOptions opt = fixture_infer(index, dir / run, InferMode::keypoints);
        opt.jobs = run[0] == 'a' ? 1 : 2;
        cli::infer(opt, log);
        cli::evaluate({dir / run / "results.json", index, dir / run / "report.json", 0.95});
    }
    const bool results_same = testing::slurp(dir / "a" / "results.json") ==
                              testing::slurp(dir / "b" / "results.json");
    const bool reports_same =
        testing::slurp(dir / "a" / "report.json") == testing::slurp(dir / "b" / "report.json");
    bool labels_same = true;
    for (const auto& e : std::filesystem::directory_iterator(dir / "a" / "labels"))
        labels_same = labels_same &&
                      testing::slurp(e.path()) == testing::slurp(dir / "b" / "labels" / e.path().filename());
    report(results_same && reports_same && labels_same, "AC11",
           fmt("two infer+eval runs: results %s, reports %s, label maps %s",
               results_same ? "identical" : "DIFFER", reports_same ? "identical" : "DIFFER",
               labels_same ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
    ac1();
    check("AC2", ac2);
    check("AC3", ac3);
    check("AC4", ac4);
    check("AC5", ac5);
    check("AC6", ac6);
    check("AC7", ac7);
    check("AC8", ac8);
    check("AC9", ac9);
    check("AC10", ac10);
    check("AC11", ac11);
    std::printf("%d failed\n", failures);
    return failures == 0 ? 0 : 1;
}
