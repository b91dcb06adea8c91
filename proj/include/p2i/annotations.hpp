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

#ifndef P2I_ANNOTATIONS_HPP_
#define P2I_ANNOTATIONS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "p2i/raster.hpp"

namespace p2i {

inline constexpr int kNumJoints = 17;

struct ImageRecord {
    std::int64_t image_id = 0;
    int width = 0;
    int height = 0;
    std::string file_name;

    friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// One COCO joint. v: 0 = not labeled, 1 = labeled but occluded, 2 = visible.
struct Joint {
    double x = 0.0;
    double y = 0.0;
    int v = 0;

    friend bool operator==(const Joint&, const Joint&) = default;
};

using KeypointSet = std::array<Joint, kNumJoints>;

struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Flat x0,y0,x1,y1,... vertex list of one ring.
using Polygon = std::vector<double>;

/// Uncompressed COCO run-length encoding: alternating background/foreground
/// run lengths over the column-major pixel order, starting with background.
struct Rle {
    int height = 0;
    int width = 0;
    std::vector<std::uint32_t> counts;

    friend bool operator==(const Rle&, const Rle&) = default;
};

using Segmentation = std::variant<std::vector<Polygon>, Rle>;

struct PersonInstance {
    std::int64_t instance_id = 0;
    std::int64_t image_id = 0;
    BBox bbox;
    Segmentation segmentation;
    KeypointSet keypoints{};
    bool iscrowd = false;

    int visible_joint_count() const;
    friend bool operator==(const PersonInstance&, const PersonInstance&) = default;
};

using BinaryMask = Raster<std::uint8_t, struct BinaryMaskTag>;

using Limb = std::pair<int, int>;

/// Retained images and their person instances. Instances are sorted by
/// (image_id, instance_id); images by image_id.
class DatasetIndex {
public:
    DatasetIndex() = default;
    DatasetIndex(std::vector<ImageRecord> images, std::vector<PersonInstance> instances,
                 std::vector<Limb> skeleton);

    const std::vector<ImageRecord>& images() const { return images_; }
    const std::vector<PersonInstance>& instances() const { return instances_; }
    /// Category skeleton from the keypoints document (0-based), empty if absent.
    const std::vector<Limb>& skeleton() const { return skeleton_; }

    const ImageRecord* find_image(std::int64_t image_id) const;
    std::span<const PersonInstance> instances_of(std::int64_t image_id) const;

    friend bool operator==(const DatasetIndex&, const DatasetIndex&) = default;

private:
    std::vector<ImageRecord> images_;
    std::vector<PersonInstance> instances_;
    std::vector<Limb> skeleton_;
};

struct ParseOptions {
    /// Drop instances whose 17 joints are all v=0.
    bool require_labeled_keypoints = false;
};

/// Intersects a COCO instances document with a COCO person_keypoints
/// document. Instances are matched by annotation id; masks, bbox and crowd
/// flag come from the segmentation document, joints from the keypoints
/// document. Crowd instances, instances whose mask decodes empty, and images
/// left without instances are dropped.
DatasetIndex parse_dataset(const nlohmann::json& segmentation_doc,
                           const nlohmann::json& keypoints_doc, const ParseOptions& options = {});

nlohmann::json load_json_file(const std::filesystem::path& path);

// Mask codecs.
BinaryMask decode_mask(const Segmentation& segmentation, int width, int height);
BinaryMask decode_polygons(std::span<const Polygon> rings, int width, int height);
BinaryMask decode_rle(const Rle& rle);
Rle encode_rle(const BinaryMask& mask);
/// COCO's compressed string form of the counts array (LEB128-like, with
/// delta coding from the third run on).
std::vector<std::uint32_t> decode_rle_string(const std::string& s);
std::string encode_rle_string(std::span<const std::uint32_t> counts);

std::size_t mask_area(const BinaryMask& mask);

// Index file: a JSON document tagged with format name and version.
inline constexpr int kIndexVersion = 1;
nlohmann::json index_to_json(const DatasetIndex& index);
DatasetIndex index_from_json(const nlohmann::json& doc);
void write_index(const DatasetIndex& index, const std::filesystem::path& path);
DatasetIndex read_index(const std::filesystem::path& path);

nlohmann::json segmentation_to_json(const Segmentation& seg);
Segmentation segmentation_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace p2i

#endif  // P2I_ANNOTATIONS_HPP_
