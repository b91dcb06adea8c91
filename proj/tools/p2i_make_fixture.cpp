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


// Writes the synthetic evaluation fixture: five scenes of touching or
// overlapping stick-figure people, ground-truth annotations in COCO form,
// blurred-ground-truth score maps and two-class logits.
//
//   p2i_make_fixture <out_dir>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "p2i/annotations.hpp"
#include "p2i/fusion.hpp"
#include "p2i/image_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace p2i;

namespace {

constexpr int kWidth = 160;
constexpr int kHeight = 120;

struct Vec {
    double x = 0.0, y = 0.0;
};

Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }

Vec polar(double len, double deg) {
    const double r = deg * 3.14159265358979323846 / 180.0;
    return {len * std::sin(r), len * std::cos(r)};
}

// Pose in image coordinates. Angles are measured from straight down,
// positive towards image +x.
struct PersonSpec {
    Vec hip;              // midpoint of the hips
    double height;        // head top to ankles
    double l_arm[2];      // upper / lower arm angles, image-right side
    double r_arm[2];      // image-left side
    double l_leg = 8.0;
    double r_leg = -8.0;
    Rgb shirt;
    Rgb trousers;
    bool polygon = false;  // annotate as polygon rings instead of RLE
    std::array<int, kNumJoints> visibility;
};

struct Person {
    PersonSpec spec;
    std::array<Vec, kNumJoints> joints;
    BinaryMask drawn;  // pixels covered before occlusion
    std::vector<Polygon> rings;
};

std::array<int, kNumJoints> all_visible() {
    std::array<int, kNumJoints> v;
    v.fill(2);
    return v;
}

std::array<Vec, kNumJoints> pose(const PersonSpec& s) {
    const double h = s.height;
    std::array<Vec, kNumJoints> j;
    const Vec neck = s.hip + Vec{0.0, -0.32 * h};
    j[0] = neck + Vec{0.0, -0.1 * h};
    j[1] = j[0] + Vec{0.025 * h, -0.02 * h};
    j[2] = j[0] + Vec{-0.025 * h, -0.02 * h};
    j[3] = j[0] + Vec{0.05 * h, -0.01 * h};
    j[4] = j[0] + Vec{-0.05 * h, -0.01 * h};
    j[5] = neck + Vec{0.11 * h, 0.01 * h};
    j[6] = neck + Vec{-0.11 * h, 0.01 * h};
    j[7] = j[5] + polar(0.16 * h, s.l_arm[0]);
    j[8] = j[6] + polar(0.16 * h, s.r_arm[0]);
    j[9] = j[7] + polar(0.15 * h, s.l_arm[1]);
    j[10] = j[8] + polar(0.15 * h, s.r_arm[1]);
    j[11] = s.hip + Vec{0.06 * h, 0.0};
    j[12] = s.hip + Vec{-0.06 * h, 0.0};
    j[13] = j[11] + polar(0.22 * h, s.l_leg);
    j[14] = j[12] + polar(0.22 * h, s.r_leg);
    j[15] = j[13] + polar(0.22 * h, s.l_leg * 0.5);
    j[16] = j[14] + polar(0.22 * h, s.r_leg * 0.5);
    return j;
}

double segment_distance(Vec p, Vec a, Vec b) {
    const Vec ab = b - a, ap = p - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    const double t = len2 > 0.0 ? std::clamp((ap.x * ab.x + ap.y * ab.y) / len2, 0.0, 1.0) : 0.0;
    const Vec d = p - (a + t * ab);
    return std::hypot(d.x, d.y);
}

struct Capsule {
    Vec a, b;
    double radius;
    Rgb color;
};

struct Shape {
    std::vector<Capsule> parts;
    std::vector<Polygon> rings;  // for polygon persons
    Rgb fill;
};

Polygon quad_ring(Vec a, Vec b, double r) {
    const Vec d = b - a;
    const double len = std::hypot(d.x, d.y);
    const Vec n{-d.y / len * r, d.x / len * r};
    const Vec e{d.x / len * r, d.y / len * r};
    const Vec p0 = a - e + n, p1 = b + e + n, p2 = b + e - n, p3 = a - e - n;
    return {p0.x, p0.y, p1.x, p1.y, p2.x, p2.y, p3.x, p3.y};
}

Polygon octagon(Vec c, double r) {
    Polygon ring;
    for (int k = 0; k < 8; ++k) {
        const double a = (k + 0.5) * 3.14159265358979323846 / 4.0;
        ring.push_back(c.x + r * std::cos(a));
        ring.push_back(c.y + r * std::sin(a));
    }
    return ring;
}

constexpr Rgb kSkin{224, 172, 138};

Shape body(const PersonSpec& s, const std::array<Vec, kNumJoints>& j) {
    const double h = s.height;
    const Vec neck = 0.5 * (j[5] + j[6]);
    Shape shape;
    shape.fill = s.shirt;
    const double arm = 0.04 * h, leg = 0.055 * h, torso = 0.1 * h, head = 0.085 * h;
    if (s.polygon) {
        for (auto [a, b] : {std::pair{5, 7}, {7, 9}, {6, 8}, {8, 10}, {11, 13}, {13, 15}, {12, 14},
                            {14, 16}})
            shape.rings.push_back(quad_ring(j[a], j[b], a >= 11 ? leg : arm));
        shape.rings.push_back(quad_ring(neck, 0.5 * (j[11] + j[12]), torso));
        shape.rings.push_back(quad_ring(j[5], j[6], arm));
        shape.rings.push_back(octagon(j[0] + Vec{0.0, -0.01 * h}, head));
        return shape;
    }
    auto add = [&](Vec a, Vec b, double r, Rgb c) { shape.parts.push_back({a, b, r, c}); };
    add(j[11], j[13], leg, s.trousers);
    add(j[13], j[15], leg * 0.9, s.trousers);
    add(j[12], j[14], leg, s.trousers);
    add(j[14], j[16], leg * 0.9, s.trousers);
    add(neck, 0.5 * (j[11] + j[12]), torso, s.shirt);
    add(j[5], j[6], arm, s.shirt);
    add(j[5], j[7], arm, s.shirt);
    add(j[6], j[8], arm, s.shirt);
    add(j[7], j[9], arm * 0.85, kSkin);
    add(j[8], j[10], arm * 0.85, kSkin);
    add(j[0] + Vec{0.0, -0.01 * h}, j[0] + Vec{0.0, -0.01 * h}, head, kSkin);
    return shape;
}

Rgb jitter(Rgb c, std::mt19937& rng, int amount) {
    std::uniform_int_distribution<int> d(-amount, amount);
    auto ch = [&](int v) { return static_cast<std::uint8_t>(std::clamp(v + d(rng), 0, 255)); };
    return {ch(c.r), ch(c.g), ch(c.b)};
}

// Draws back to front; returns each person's visible ground-truth mask.
std::vector<BinaryMask> draw_scene(RgbImage& image, std::vector<Person>& people) {
    std::vector<BinaryMask> visible;
    InstanceLabeling owner(kWidth, kHeight, 0);
    for (std::size_t k = 0; k < people.size(); ++k) {
        Person& p = people[k];
        const Shape shape = body(p.spec, p.joints);
        p.rings = shape.rings;
        p.drawn = BinaryMask(kWidth, kHeight, 0);
        if (!shape.rings.empty()) {
            p.drawn = decode_polygons(shape.rings, kWidth, kHeight);
            for (std::size_t i = 0; i < image.size(); ++i)
                if (p.drawn[i]) {
                    image[i] = shape.fill;
                    owner[i] = static_cast<int>(k) + 1;
                }
            continue;
        }
        for (int y = 0; y < kHeight; ++y) {
            for (int x = 0; x < kWidth; ++x) {
                const Vec c{x + 0.5, y + 0.5};
                for (const Capsule& part : shape.parts) {
                    if (segment_distance(c, part.a, part.b) <= part.radius) {
                        image(x, y) = part.color;
                        owner(x, y) = static_cast<int>(k) + 1;
                        p.drawn(x, y) = 1;
                    }
                }
            }
        }
    }
    for (std::size_t k = 0; k < people.size(); ++k)
        visible.push_back(instance_mask(owner, static_cast<int>(k) + 1));
    return visible;
}

ScoreMap blurred(const BinaryMask& fg, double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i)
        sum += kernel[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (double& k : kernel)
        k /= sum;
    ScoreMap tmp(kWidth, kHeight), out(kWidth, kHeight);
    for (int y = 0; y < kHeight; ++y)
        for (int x = 0; x < kWidth; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += kernel[i + r] * fg(std::clamp(x + i, 0, kWidth - 1), y);
            tmp(x, y) = acc;
        }
    for (int y = 0; y < kHeight; ++y)
        for (int x = 0; x < kWidth; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += kernel[i + r] * tmp(x, std::clamp(y + i, 0, kHeight - 1));
            out(x, y) = std::clamp(acc, 0.0, 1.0);
        }
    return out;
}

json keypoint_array(const Person& p) {
    json kp = json::array();
    for (int j = 0; j < kNumJoints; ++j) {
        const int v = p.spec.visibility[j];
        kp.push_back(v == 0 ? 0.0 : std::round(p.joints[j].x * 10.0) / 10.0);
        kp.push_back(v == 0 ? 0.0 : std::round(p.joints[j].y * 10.0) / 10.0);
        kp.push_back(v);
    }
    return kp;
}

json bbox_of(const BinaryMask& m) {
    int x0 = kWidth, y0 = kHeight, x1 = -1, y1 = -1;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    return json::array({x0, y0, x1 - x0 + 1, y1 - y0 + 1});
}

PersonSpec person(Vec hip, double height, std::array<double, 4> arms, Rgb shirt, Rgb trousers) {
    PersonSpec s;
    s.hip = hip;
    s.height = height;
    s.l_arm[0] = arms[0];
    s.l_arm[1] = arms[1];
    s.r_arm[0] = arms[2];
    s.r_arm[1] = arms[3];
    s.shirt = shirt;
    s.trousers = trousers;
    s.visibility = all_visible();
    return s;
}

std::vector<std::vector<PersonSpec>> scenes() {
    constexpr Rgb red{200, 40, 40}, blue{40, 70, 190}, green{40, 160, 60}, yellow{220, 200, 40},
        purple{130, 50, 160}, orange{230, 120, 30}, teal{30, 150, 150}, pink{230, 110, 170},
        denim{50, 60, 110}, khaki{150, 130, 90}, black{35, 35, 35}, grey{110, 110, 110};
    std::vector<std::vector<PersonSpec>> out(5);
    // Two adults shoulder to shoulder, the front one reaching across.
    out[0] = {person({66, 62}, 92, {30, 20, -20, -10}, red, denim),
              person({92, 64}, 90, {25, 10, -95, -100}, blue, khaki)};
    // Adult with a child standing in front.
    out[1] = {person({80, 58}, 100, {40, 30, -40, -30}, green, black),
              person({104, 84}, 54, {20, 10, -60, -80}, yellow, denim)};
    // Arms over each other's shoulders.
    out[2] = {person({62, 62}, 90, {120, 160, -15, -5}, purple, grey),
              person({94, 63}, 88, {15, 5, -125, -165}, orange, khaki)};
    // Back person partly hidden by a front person annotated with polygons.
    out[3] = {person({70, 60}, 96, {35, 50, -50, -70}, teal, black),
              person({96, 66}, 84, {20, 10, -70, -90}, pink, denim)};
    out[3][1].polygon = true;
    // Three in a row; the middle one is in front.
    out[4] = {person({48, 62}, 88, {60, 70, -20, -10}, red, khaki),
              person({112, 62}, 90, {20, 10, -60, -70}, green, denim),
              person({80, 66}, 84, {70, 95, -70, -95}, blue, grey)};
    // Some occluded joints are labeled but hidden; one wrist is unlabeled.
    out[1][0].visibility[13] = out[1][0].visibility[14] = 1;
    out[4][0].visibility[9] = 0;
    return out;
}

void fill_background(RgbImage& image, int scene) {
    for (int y = 0; y < kHeight; ++y)
        for (int x = 0; x < kWidth; ++x) {
            const int base = 150 + (scene * 17) % 40;
            image(x, y) = {static_cast<std::uint8_t>(base + y / 6),
                           static_cast<std::uint8_t>(base + 10 - x / 16),
                           static_cast<std::uint8_t>(base - 20 + (x + y) / 20)};
        }
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    out << doc.dump(1) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: p2i_make_fixture <out_dir>\n";
        return 2;
    }
    const fs::path root = argv[1];
    fs::create_directories(root / "images");
    fs::create_directories(root / "scores");

    std::mt19937 rng(20260101);
    json images = json::array(), seg_anns = json::array(), kp_anns = json::array();
    std::int64_t next_ann = 100;
    const auto all = scenes();
    for (std::size_t s = 0; s < all.size(); ++s) {
        const std::int64_t image_id = static_cast<std::int64_t>(s) + 1;
        char name[32];
        std::snprintf(name, sizeof name, "scene_%02d.png", static_cast<int>(image_id));
        images.push_back({{"id", image_id}, {"width", kWidth}, {"height", kHeight},
                          {"file_name", name}});

        RgbImage image(kWidth, kHeight);
        fill_background(image, static_cast<int>(s));
        std::vector<Person> people;
        for (const PersonSpec& spec : all[s])
            people.push_back({spec, pose(spec), {}, {}});
        const std::vector<BinaryMask> visible = draw_scene(image, people);
        for (Rgb& px : image.values())
            px = jitter(px, rng, 6);
        write_png(image, root / "images" / name);

        BinaryMask fg(kWidth, kHeight, 0);
        for (std::size_t k = 0; k < people.size(); ++k) {
            const std::int64_t id = next_ann++;
            for (std::size_t i = 0; i < fg.size(); ++i)
                fg[i] |= visible[k][i];
            // Polygon persons are frontmost, so their rings are exact.
            const Segmentation seg = people[k].rings.empty() ? Segmentation(encode_rle(visible[k]))
                                                             : Segmentation(people[k].rings);
            seg_anns.push_back({{"id", id},
                                {"image_id", image_id},
                                {"category_id", 1},
                                {"iscrowd", 0},
                                {"area", mask_area(visible[k])},
                                {"bbox", bbox_of(visible[k])},
                                {"segmentation", segmentation_to_json(seg)}});
            kp_anns.push_back({{"id", id},
                               {"image_id", image_id},
                               {"category_id", 1},
                               {"iscrowd", 0},
                               {"num_keypoints", people[k].spec.visibility.size()},
                               {"keypoints", keypoint_array(people[k])}});
        }
        const ScoreMap score = blurred(fg, 1.5);
        write_score_map(score, root / "scores" / (std::to_string(image_id) + ".p2if"));
        SegLogits logits{kWidth, kHeight, std::vector<double>(2 * score.size())};
        for (std::size_t i = 0; i < score.size(); ++i) {
            const double p = std::clamp(score[i], 1e-4, 1.0 - 1e-4);
            logits.values[2 * i + 1] = std::log(p / (1.0 - p));
        }
        write_seg_logits(logits, root / "scores" / (std::to_string(image_id) + ".p2il"));
    }

    // Records the ingest step must drop.
    BinaryMask crowd(kWidth, kHeight, 0);
    for (int y = 70; y < 110; ++y)
        for (int x = 10; x < 60; ++x)
            crowd(x, y) = 1;
    const Rle crowd_rle = encode_rle(crowd);
    images.push_back({{"id", 6}, {"width", kWidth}, {"height", kHeight}, {"file_name", "crowd.png"}});
    seg_anns.push_back({{"id", 900},
                        {"image_id", 6},
                        {"category_id", 1},
                        {"iscrowd", 1},
                        {"bbox", {10, 70, 50, 40}},
                        {"segmentation",
                         {{"size", {kHeight, kWidth}},
                          {"counts", encode_rle_string(crowd_rle.counts)}}}});
    kp_anns.push_back({{"id", 900}, {"image_id", 6}, {"category_id", 1}, {"iscrowd", 1},
                       {"keypoints", std::vector<int>(3 * kNumJoints, 0)}});
    // A person without a keypoints record and a non-person object.
    seg_anns.push_back({{"id", 901},
                        {"image_id", 1},
                        {"category_id", 1},
                        {"iscrowd", 0},
                        {"bbox", {140, 90, 10, 20}},
                        {"segmentation", {{140, 90, 150, 90, 150, 110, 140, 110}}}});
    seg_anns.push_back({{"id", 902},
                        {"image_id", 2},
                        {"category_id", 2},
                        {"iscrowd", 0},
                        {"bbox", {5, 5, 20, 10}},
                        {"segmentation", {{5, 5, 25, 5, 25, 15, 5, 15}}}});

    json skeleton = json::array();
    const SkeletonSpec coco = SkeletonSpec::coco();
    for (auto [a, b] : coco.limbs())
        skeleton.push_back({a + 1, b + 1});
    const json categories = json::array(
        {{{"id", 1}, {"name", "person"}, {"supercategory", "person"}},
         {{"id", 2}, {"name", "bicycle"}, {"supercategory", "vehicle"}}});
    json kp_categories = json::array({{{"id", 1},
                                       {"name", "person"},
                                       {"supercategory", "person"},
                                       {"skeleton", skeleton}}});

    write_json(root / "instances.json",
               {{"images", images}, {"annotations", seg_anns}, {"categories", categories}});
    write_json(root / "person_keypoints.json",
               {{"images", images}, {"annotations", kp_anns}, {"categories", kp_categories}});
    std::cout << "wrote " << root.string() << '\n';
    return 0;
}
