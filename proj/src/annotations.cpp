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

#include "p2i/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "p2i/errors.hpp"

namespace p2i {

using nlohmann::json;

namespace {

constexpr const char* kIndexFormat = "p2i-dataset-index";

std::string record_name(const char* doc, std::size_t i, const json& rec) {
    std::ostringstream os;
    os << doc << ": annotations[" << i << "]";
    if (rec.is_object() && rec.contains("id") && rec["id"].is_number_integer())
        os << " (id " << rec["id"].get<std::int64_t>() << ")";
    return os.str();
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw ParseError(where + ": missing '" + key + "'");
    return obj[key];
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + ": field '" + key + "' has the wrong type");
    }
}

const json& array_or_empty(const json& doc, const char* key, const char* doc_name) {
    static const json kEmpty = json::array();
    if (!doc.contains(key))
        return kEmpty;
    if (!doc[key].is_array())
        throw ParseError(std::string(doc_name) + ": '" + key + "' is not an array");
    return doc[key];
}

std::int64_t person_category_id(const json& doc) {
    if (doc.contains("categories") && doc["categories"].is_array()) {
        for (const json& c : doc["categories"])
            if (c.is_object() && c.value("name", "") == "person" && c.contains("id"))
                return c["id"].get<std::int64_t>();
    }
    return 1;
}

std::vector<Limb> category_skeleton(const json& doc, std::int64_t person_id) {
    std::vector<Limb> limbs;
    if (!doc.contains("categories") || !doc["categories"].is_array())
        return limbs;
    for (const json& c : doc["categories"]) {
        if (!c.is_object() || c.value("id", std::int64_t{-1}) != person_id || !c.contains("skeleton"))
            continue;
        for (const json& pair : c["skeleton"]) {
            if (!pair.is_array() || pair.size() != 2)
                throw ParseError("keypoints document: malformed category skeleton entry");
            // COCO skeletons are 1-based.
            const int a = pair[0].get<int>() - 1, b = pair[1].get<int>() - 1;
            if (a < 0 || b < 0 || a >= kNumJoints || b >= kNumJoints)
                throw ValidationError("keypoints document: skeleton joint out of range 1..17");
            limbs.emplace_back(a, b);
        }
    }
    return limbs;
}

KeypointSet keypoints_from_array(const json& arr, const std::string& where) {
    if (!arr.is_array())
        throw ParseError(where + ": 'keypoints' is not an array");
    if (arr.size() != 3 * kNumJoints)
        throw ValidationError(where + ": keypoint array has " + std::to_string(arr.size()) +
                              " values, expected 51");
    KeypointSet kp{};
    for (int k = 0; k < kNumJoints; ++k) {
        try {
            kp[k].x = arr[3 * k].get<double>();
            kp[k].y = arr[3 * k + 1].get<double>();
            kp[k].v = static_cast<int>(arr[3 * k + 2].get<double>());
        } catch (const json::exception&) {
            throw ParseError(where + ": non-numeric keypoint value");
        }
        if (kp[k].v < 0 || kp[k].v > 2)
            throw ValidationError(where + ": visibility flag out of range for joint " +
                                  std::to_string(k));
    }
    return kp;
}

BBox bbox_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4)
        throw ParseError(where + ": 'bbox' must have 4 numbers");
    try {
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    } catch (const json::exception&) {
        throw ParseError(where + ": non-numeric bbox");
    }
}

BBox clamp_bbox(BBox b, int width, int height) {
    const double x0 = std::clamp(b.x, 0.0, static_cast<double>(width));
    const double y0 = std::clamp(b.y, 0.0, static_cast<double>(height));
    const double x1 = std::clamp(b.x + b.w, 0.0, static_cast<double>(width));
    const double y1 = std::clamp(b.y + b.h, 0.0, static_cast<double>(height));
    return {x0, y0, std::max(0.0, x1 - x0), std::max(0.0, y1 - y0)};
}

void clamp_keypoints(KeypointSet& kp, int width, int height) {
    for (Joint& j : kp) {
        if (j.v == 0)
            continue;
        j.x = std::clamp(j.x, 0.0, static_cast<double>(width - 1));
        j.y = std::clamp(j.y, 0.0, static_cast<double>(height - 1));
    }
}

bool crowd_flag(const json& rec, const std::string& where) {
    if (!rec.contains("iscrowd"))
        return false;
    const json& c = rec["iscrowd"];
    if (c.is_boolean())
        return c.get<bool>();
    if (c.is_number())
        return c.get<double>() != 0.0;
    throw ParseError(where + ": 'iscrowd' has the wrong type");
}

json keypoints_to_json(const KeypointSet& kp) {
    json arr = json::array();
    for (const Joint& j : kp) {
        arr.push_back(j.x);
        arr.push_back(j.y);
        arr.push_back(j.v);
    }
    return arr;
}

}  // namespace

int PersonInstance::visible_joint_count() const {
    return static_cast<int>(
        std::count_if(keypoints.begin(), keypoints.end(), [](const Joint& j) { return j.v > 0; }));
}

DatasetIndex::DatasetIndex(std::vector<ImageRecord> images, std::vector<PersonInstance> instances,
                           std::vector<Limb> skeleton)
    : images_(std::move(images)), instances_(std::move(instances)), skeleton_(std::move(skeleton)) {
    std::sort(images_.begin(), images_.end(),
              [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
    std::sort(instances_.begin(), instances_.end(),
              [](const PersonInstance& a, const PersonInstance& b) {
                  return std::pair(a.image_id, a.instance_id) < std::pair(b.image_id, b.instance_id);
              });
    for (std::size_t i = 1; i < images_.size(); ++i)
        if (images_[i].image_id == images_[i - 1].image_id)
            throw ValidationError("duplicate image id " + std::to_string(images_[i].image_id));
    for (const PersonInstance& inst : instances_)
        if (find_image(inst.image_id) == nullptr)
            throw ValidationError("instance " + std::to_string(inst.instance_id) +
                                  " references unknown image " + std::to_string(inst.image_id));
}

const ImageRecord* DatasetIndex::find_image(std::int64_t image_id) const {
    auto it = std::lower_bound(images_.begin(), images_.end(), image_id,
                               [](const ImageRecord& r, std::int64_t id) { return r.image_id < id; });
    return (it != images_.end() && it->image_id == image_id) ? &*it : nullptr;
}

std::span<const PersonInstance> DatasetIndex::instances_of(std::int64_t image_id) const {
    auto lo = std::lower_bound(
        instances_.begin(), instances_.end(), image_id,
        [](const PersonInstance& p, std::int64_t id) { return p.image_id < id; });
    auto hi = std::upper_bound(
        lo, instances_.end(), image_id,
        [](std::int64_t id, const PersonInstance& p) { return id < p.image_id; });
    return {lo, hi};
}

DatasetIndex parse_dataset(const json& segmentation_doc, const json& keypoints_doc,
                           const ParseOptions& options) {
    if (!segmentation_doc.is_object())
        throw ParseError("segmentation document: top level is not an object");
    if (!keypoints_doc.is_object())
        throw ParseError("keypoints document: top level is not an object");

    const std::int64_t person_id = person_category_id(segmentation_doc);
    const std::int64_t kp_person_id = person_category_id(keypoints_doc);

    std::map<std::int64_t, ImageRecord> images;
    const json& seg_images = array_or_empty(segmentation_doc, "images", "segmentation document");
    for (std::size_t i = 0; i < seg_images.size(); ++i) {
        const std::string where = "segmentation document: images[" + std::to_string(i) + "]";
        ImageRecord rec;
        rec.image_id = get_as<std::int64_t>(seg_images[i], "id", where);
        rec.width = get_as<int>(seg_images[i], "width", where);
        rec.height = get_as<int>(seg_images[i], "height", where);
        rec.file_name = seg_images[i].value("file_name", "");
        if (rec.width < 1 || rec.height < 1)
            throw ValidationError(where + ": image dimensions must be positive");
        if (!images.emplace(rec.image_id, rec).second)
            throw ValidationError(where + ": duplicate image id " + std::to_string(rec.image_id));
    }

    // Keypoints document: id -> (joints, crowd flag).
    std::map<std::int64_t, std::pair<KeypointSet, bool>> joints_by_id;
    const json& kp_anns = array_or_empty(keypoints_doc, "annotations", "keypoints document");
    for (std::size_t i = 0; i < kp_anns.size(); ++i) {
        const json& rec = kp_anns[i];
        const std::string where = record_name("keypoints document", i, rec);
        const auto id = get_as<std::int64_t>(rec, "id", where);
        if (rec.contains("category_id") && rec["category_id"].get<std::int64_t>() != kp_person_id)
            continue;
        if (!rec.contains("keypoints"))
            continue;
        KeypointSet kp = keypoints_from_array(rec["keypoints"], where);
        joints_by_id[id] = {kp, crowd_flag(rec, where)};
    }

    std::vector<PersonInstance> kept;
    std::set<std::int64_t> seen_ids;
    const json& seg_anns = array_or_empty(segmentation_doc, "annotations", "segmentation document");
    for (std::size_t i = 0; i < seg_anns.size(); ++i) {
        const json& rec = seg_anns[i];
        const std::string where = record_name("segmentation document", i, rec);
        PersonInstance inst;
        inst.instance_id = get_as<std::int64_t>(rec, "id", where);
        if (!seen_ids.insert(inst.instance_id).second)
            throw ValidationError(where + ": duplicate annotation id");
        if (get_as<std::int64_t>(rec, "category_id", where) != person_id)
            continue;
        inst.image_id = get_as<std::int64_t>(rec, "image_id", where);
        inst.iscrowd = crowd_flag(rec, where);
        auto joints = joints_by_id.find(inst.instance_id);
        if (inst.iscrowd || joints == joints_by_id.end() || joints->second.second)
            continue;
        auto img = images.find(inst.image_id);
        if (img == images.end())
            throw ParseError(where + ": unknown image_id " + std::to_string(inst.image_id));
        const ImageRecord& image = img->second;

        inst.segmentation = segmentation_from_json(require(rec, "segmentation", where), where);
        inst.bbox = clamp_bbox(bbox_from_json(require(rec, "bbox", where), where), image.width,
                               image.height);
        inst.keypoints = joints->second.first;
        clamp_keypoints(inst.keypoints, image.width, image.height);
        if (options.require_labeled_keypoints && inst.visible_joint_count() == 0)
            continue;

        BinaryMask mask;
        try {
            mask = decode_mask(inst.segmentation, image.width, image.height);
        } catch (const CodecError& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (mask_area(mask) == 0)
            continue;
        kept.push_back(std::move(inst));
    }

    std::set<std::int64_t> used_images;
    for (const PersonInstance& p : kept)
        used_images.insert(p.image_id);
    std::vector<ImageRecord> kept_images;
    for (std::int64_t id : used_images)
        kept_images.push_back(images.at(id));

    return DatasetIndex(std::move(kept_images), std::move(kept),
                        category_skeleton(keypoints_doc, kp_person_id));
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Mask codecs

BinaryMask decode_polygons(std::span<const Polygon> rings, int width, int height) {
    BinaryMask mask(width, height, 0);
    std::vector<double> xs;
    for (const Polygon& ring : rings) {
        if (ring.size() < 6 || ring.size() % 2 != 0)
            throw CodecError("degenerate polygon: " + std::to_string(ring.size()) + " coordinates");
        for (double c : ring)
            if (!std::isfinite(c))
                throw CodecError("degenerate polygon: non-finite coordinate");
        const std::size_t n = ring.size() / 2;
        // Even-odd fill sampled at pixel centers; rings are unioned.
        for (int y = 0; y < height; ++y) {
            const double yc = y + 0.5;
            xs.clear();
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = (i + 1) % n;
                const double x0 = ring[2 * i], y0 = ring[2 * i + 1];
                const double x1 = ring[2 * j], y1 = ring[2 * j + 1];
                if ((y0 <= yc) != (y1 <= yc))
                    xs.push_back(x0 + (yc - y0) * (x1 - x0) / (y1 - y0));
            }
            std::sort(xs.begin(), xs.end());
            for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
                const int first = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
                const int last = std::min(width, static_cast<int>(std::ceil(xs[k + 1] - 0.5)));
                for (int x = first; x < last; ++x)
                    mask(x, y) = 1;
            }
        }
    }
    return mask;
}

BinaryMask decode_rle(const Rle& rle) {
    if (rle.width < 0 || rle.height < 0)
        throw CodecError("RLE with negative size");
    const std::uint64_t total = static_cast<std::uint64_t>(rle.width) * rle.height;
    const std::uint64_t sum =
        std::accumulate(rle.counts.begin(), rle.counts.end(), std::uint64_t{0});
    if (sum != total)
        throw CodecError("RLE counts sum to " + std::to_string(sum) + ", expected " +
                         std::to_string(total));
    BinaryMask mask(rle.width, rle.height, 0);
    std::uint64_t pos = 0;
    std::uint8_t value = 0;
    for (std::uint32_t run : rle.counts) {
        if (value)
            for (std::uint64_t i = pos; i < pos + run; ++i)
                mask(static_cast<int>(i / rle.height), static_cast<int>(i % rle.height)) = 1;
        pos += run;
        value ^= 1;
    }
    return mask;
}

BinaryMask decode_mask(const Segmentation& segmentation, int width, int height) {
    if (const auto* rings = std::get_if<std::vector<Polygon>>(&segmentation)) {
        if (rings->empty())
            throw CodecError("empty polygon list");
        return decode_polygons(*rings, width, height);
    }
    const Rle& rle = std::get<Rle>(segmentation);
    if (rle.width != width || rle.height != height)
        throw CodecError("RLE size " + std::to_string(rle.width) + "x" +
                         std::to_string(rle.height) + " does not match image " +
                         std::to_string(width) + "x" + std::to_string(height));
    return decode_rle(rle);
}

Rle encode_rle(const BinaryMask& mask) {
    Rle rle{mask.height(), mask.width(), {}};
    std::uint32_t run = 0;
    std::uint8_t current = 0;
    for (int x = 0; x < mask.width(); ++x) {
        for (int y = 0; y < mask.height(); ++y) {
            const std::uint8_t v = mask(x, y) ? 1 : 0;
            if (v != current) {
                rle.counts.push_back(run);
                run = 0;
                current = v;
            }
            ++run;
        }
    }
    rle.counts.push_back(run);
    return rle;
}

std::vector<std::uint32_t> decode_rle_string(const std::string& s) {
    std::vector<std::uint32_t> counts;
    std::size_t p = 0;
    while (p < s.size()) {
        std::int64_t x = 0;
        int k = 0;
        bool more = true;
        while (more) {
            if (p >= s.size())
                throw CodecError("truncated compressed RLE string");
            const int c = static_cast<int>(s[p]) - 48;
            if (c < 0 || c > 63)
                throw CodecError("invalid character in compressed RLE string");
            if (k > 10)
                throw CodecError("run too long in compressed RLE string");
            x |= static_cast<std::int64_t>(c & 0x1f) << (5 * k);
            more = (c & 0x20) != 0;
            ++p;
            ++k;
            if (!more && (c & 0x10))
                x |= static_cast<std::int64_t>(-1) << (5 * k);
        }
        if (counts.size() > 2)
            x += counts[counts.size() - 2];
        if (x < 0)
            throw CodecError("negative run in compressed RLE string");
        counts.push_back(static_cast<std::uint32_t>(x));
    }
    return counts;
}

std::string encode_rle_string(std::span<const std::uint32_t> counts) {
    std::string s;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        std::int64_t x = counts[i];
        if (i > 2)
            x -= counts[i - 2];
        bool more = true;
        while (more) {
            int c = static_cast<int>(x & 0x1f);
            x >>= 5;
            more = (c & 0x10) ? x != -1 : x != 0;
            if (more)
                c |= 0x20;
            s.push_back(static_cast<char>(c + 48));
        }
    }
    return s;
}

std::size_t mask_area(const BinaryMask& mask) {
    return static_cast<std::size_t>(
        std::count_if(mask.values().begin(), mask.values().end(), [](std::uint8_t v) { return v != 0; }));
}

// ---------------------------------------------------------------------------
// Serialization

json segmentation_to_json(const Segmentation& seg) {
    if (const auto* rings = std::get_if<std::vector<Polygon>>(&seg))
        return json(*rings);
    const Rle& rle = std::get<Rle>(seg);
    return json{{"size", {rle.height, rle.width}}, {"counts", rle.counts}};
}

Segmentation segmentation_from_json(const json& j, const std::string& where) {
    try {
        if (j.is_array()) {
            std::vector<Polygon> rings;
            for (const json& ring : j)
                rings.push_back(ring.get<Polygon>());
            return rings;
        }
        if (j.is_object()) {
            const json& size = require(j, "size", where);
            if (!size.is_array() || size.size() != 2)
                throw ParseError(where + ": RLE 'size' must be [h, w]");
            Rle rle;
            rle.height = size[0].get<int>();
            rle.width = size[1].get<int>();
            const json& counts = require(j, "counts", where);
            if (counts.is_string()) {
                rle.counts = decode_rle_string(counts.get<std::string>());
            } else {
                for (const json& c : counts) {
                    const auto v = c.get<std::int64_t>();
                    if (v < 0)
                        throw CodecError(where + ": negative RLE count");
                    rle.counts.push_back(static_cast<std::uint32_t>(v));
                }
            }
            return rle;
        }
    } catch (const json::exception&) {
        throw ParseError(where + ": malformed segmentation");
    } catch (const CodecError& e) {
        throw ParseError(where + ": " + e.what());
    }
    throw ParseError(where + ": segmentation is neither a polygon list nor an RLE object");
}

json index_to_json(const DatasetIndex& index) {
    json images = json::array();
    for (const ImageRecord& r : index.images())
        images.push_back({{"id", r.image_id},
                          {"width", r.width},
                          {"height", r.height},
                          {"file_name", r.file_name}});
    json instances = json::array();
    for (const PersonInstance& p : index.instances())
        instances.push_back({{"id", p.instance_id},
                             {"image_id", p.image_id},
                             {"bbox", {p.bbox.x, p.bbox.y, p.bbox.w, p.bbox.h}},
                             {"keypoints", keypoints_to_json(p.keypoints)},
                             {"segmentation", segmentation_to_json(p.segmentation)}});
    json skeleton = json::array();
    for (const auto& [a, b] : index.skeleton())
        skeleton.push_back({a, b});
    return json{{"format", kIndexFormat},
                {"version", kIndexVersion},
                {"image_count", index.images().size()},
                {"instance_count", index.instances().size()},
                {"skeleton", skeleton},
                {"images", images},
                {"instances", instances}};
}

DatasetIndex index_from_json(const json& doc) {
    if (!doc.is_object() || doc.value("format", "") != kIndexFormat)
        throw ParseError("not a dataset index document");
    if (doc.value("version", 0) != kIndexVersion)
        throw ParseError("unsupported index version " + std::to_string(doc.value("version", 0)));
    std::vector<ImageRecord> images;
    for (const json& r : require(doc, "images", "index")) {
        images.push_back({get_as<std::int64_t>(r, "id", "index image"),
                          get_as<int>(r, "width", "index image"),
                          get_as<int>(r, "height", "index image"), r.value("file_name", "")});
    }
    std::vector<PersonInstance> instances;
    for (const json& r : require(doc, "instances", "index")) {
        const std::string where = "index instance " + std::to_string(r.value("id", -1));
        PersonInstance p;
        p.instance_id = get_as<std::int64_t>(r, "id", where);
        p.image_id = get_as<std::int64_t>(r, "image_id", where);
        p.bbox = bbox_from_json(require(r, "bbox", where), where);
        p.keypoints = keypoints_from_array(require(r, "keypoints", where), where);
        p.segmentation = segmentation_from_json(require(r, "segmentation", where), where);
        instances.push_back(std::move(p));
    }
    std::vector<Limb> skeleton;
    if (doc.contains("skeleton"))
        for (const json& pair : doc["skeleton"])
            skeleton.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
    return DatasetIndex(std::move(images), std::move(instances), std::move(skeleton));
}

void write_index(const DatasetIndex& index, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << index_to_json(index).dump(1) << '\n';
}

DatasetIndex read_index(const std::filesystem::path& path) {
    return index_from_json(load_json_file(path));
}

}  // namespace p2i
