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

#include "p2i/fusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <stdexcept>
#include <string>

#include "p2i/errors.hpp"

namespace p2i {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

void put_f32(std::string& out, double v) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

double get_f32(const std::string& in, std::size_t at) {
    return std::bit_cast<float>(get_u32(in, at));
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CodecError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::string& bytes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw CodecError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Validates the 12-byte header and returns (width, height).
std::pair<int, int> read_header(const std::string& bytes, const char* magic, std::size_t per_pixel,
                                const std::filesystem::path& path) {
    if (bytes.size() < 12 || bytes.compare(0, 4, magic) != 0)
        throw CodecError(path.string() + ": missing " + magic + " header");
    const std::uint32_t w = get_u32(bytes, 4), h = get_u32(bytes, 8);
    if (w == 0 || h == 0 || w > 1u << 16 || h > 1u << 16)
        throw CodecError(path.string() + ": implausible dimensions");
    const std::size_t expected = 12 + static_cast<std::size_t>(w) * h * per_pixel * 4;
    if (bytes.size() != expected)
        throw CodecError(path.string() + ": expected " + std::to_string(expected) + " bytes, got " +
                         std::to_string(bytes.size()));
    return {static_cast<int>(w), static_cast<int>(h)};
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(temperature > 0.0))
        throw std::invalid_argument("temperature must be > 0");
    if (!(edge_epsilon > 0.0))
        throw std::invalid_argument("edge epsilon must be > 0");
    if (!(background_threshold >= 0.0 && background_threshold <= 1.0))
        throw std::invalid_argument("background threshold must be in [0, 1]");
    if (!(heatmap_sigma > 0.0))
        throw std::invalid_argument("heatmap sigma must be > 0");
    if (superpixels < 1)
        throw std::invalid_argument("superpixel target must be >= 1");
    if (!(compactness > 0.0))
        throw std::invalid_argument("compactness must be > 0");
    if (floyd_warshall_cap < 1)
        throw std::invalid_argument("Floyd-Warshall cap must be >= 1");
}

ScoreMap read_score_map(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    const auto [w, h] = read_header(bytes, "P2IF", 1, path);
    ScoreMap score(w, h);
    for (std::size_t i = 0; i < score.size(); ++i) {
        const double v = get_f32(bytes, 12 + 4 * i);
        if (!(v >= 0.0 && v <= 1.0))
            throw CodecError(path.string() + ": score outside [0, 1] at pixel " + std::to_string(i));
        score[i] = v;
    }
    return score;
}

void write_score_map(const ScoreMap& score, const std::filesystem::path& path) {
    std::string bytes = "P2IF";
    put_u32(bytes, static_cast<std::uint32_t>(score.width()));
    put_u32(bytes, static_cast<std::uint32_t>(score.height()));
    for (double v : score.values()) {
        if (!(v >= 0.0 && v <= 1.0))
            throw CodecError("write_score_map: score outside [0, 1]");
        put_f32(bytes, v);
    }
    dump(bytes, path);
}

SegLogits read_seg_logits(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    const auto [w, h] = read_header(bytes, "P2IL", 2, path);
    SegLogits logits{w, h, std::vector<double>(static_cast<std::size_t>(w) * h * 2)};
    for (std::size_t i = 0; i < logits.values.size(); ++i) {
        logits.values[i] = get_f32(bytes, 12 + 4 * i);
        if (!std::isfinite(logits.values[i]))
            throw CodecError(path.string() + ": non-finite logit");
    }
    return logits;
}

void write_seg_logits(const SegLogits& logits, const std::filesystem::path& path) {
    std::string bytes = "P2IL";
    put_u32(bytes, static_cast<std::uint32_t>(logits.width));
    put_u32(bytes, static_cast<std::uint32_t>(logits.height));
    for (double v : logits.values)
        put_f32(bytes, v);
    dump(bytes, path);
}

CascadeWeights read_cascade_weights(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::vector<double> values;
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError(path.string() + ": not a number: '" + tok + "'");
        }
    }
    if (values.size() != kNumJoints + 1)
        throw ValidationError(path.string() + ": expected 18 weights, found " +
                              std::to_string(values.size()));
    CascadeWeights w;
    std::copy(values.begin(), values.begin() + kNumJoints, w.heat_weights.begin());
    w.shape_weight = values.back();
    return w;
}

InstanceHeatmap fuse(const PoseInstanceMap& prior, const ScoreMap& score) {
    if (prior.width() != score.width() || prior.height() != score.height())
        throw std::invalid_argument("fuse: dimension mismatch");
    InstanceHeatmap heat(prior.width(), prior.height(), prior.instance_count());
    const auto pixels = static_cast<std::ptrdiff_t>(score.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pixels; ++p) {
        const auto src = prior.pixel(static_cast<std::size_t>(p));
        auto dst = heat.pixel(static_cast<std::size_t>(p));
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i] = src[i] * score[static_cast<std::size_t>(p)];
    }
    return heat;
}

InstanceLabeling label_instances(const InstanceHeatmap& heat, const ScoreMap& score,
                                 double background_threshold) {
    if (heat.width() != score.width() || heat.height() != score.height())
        throw std::invalid_argument("label_instances: dimension mismatch");
    InstanceLabeling labels(score.width(), score.height(), 0);
    if (heat.instance_count() == 0)
        return labels;
    const auto pixels = static_cast<std::ptrdiff_t>(score.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pixels; ++p) {
        if (score[static_cast<std::size_t>(p)] < background_threshold)
            continue;
        const auto h = heat.pixel(static_cast<std::size_t>(p));
        // max_element returns the first maximum, i.e. the lowest index on ties.
        labels[static_cast<std::size_t>(p)] =
            1 + static_cast<std::int32_t>(std::max_element(h.begin(), h.end()) - h.begin());
    }
    return labels;
}

InstanceLabeling bbox_baseline(const ScoreMap& score, std::span<const BBox> boxes,
                               double background_threshold) {
    InstanceLabeling labels(score.width(), score.height(), 0);
    for (int y = 0; y < score.height(); ++y) {
        const double cy = y + 0.5;
        for (int x = 0; x < score.width(); ++x) {
            if (score(x, y) < background_threshold)
                continue;
            const double cx = x + 0.5;
            int best = -1;
            for (std::size_t i = 0; i < boxes.size(); ++i) {
                const BBox& b = boxes[i];
                if (cx < b.x || cx >= b.x + b.w || cy < b.y || cy >= b.y + b.h)
                    continue;
                if (best < 0 || b.area() < boxes[best].area())
                    best = static_cast<int>(i);
            }
            labels(x, y) = best + 1;
        }
    }
    return labels;
}

std::vector<double> grid_fast_sweeping(const GradientMap& cost, std::span<const Pixel> seeds,
                                       double epsilon) {
    if (seeds.empty())
        throw std::invalid_argument("grid_fast_sweeping: empty seed set");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("grid_fast_sweeping: epsilon must be positive");
    const int w = cost.width(), h = cost.height();
    std::vector<double> node(cost.size());
    for (std::size_t i = 0; i < cost.size(); ++i)
        node[i] = epsilon + cost[i];
    std::vector<double> dist(cost.size(), kInfinity);
    std::vector<char> is_seed(cost.size(), 0);
    for (const Pixel& s : seeds) {
        if (!cost.contains(s.x, s.y))
            throw std::invalid_argument("grid_fast_sweeping: seed outside the grid");
        dist[cost.index(s.x, s.y)] = 0.0;
        is_seed[cost.index(s.x, s.y)] = 1;
    }
    constexpr int kOffsets[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                    {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
    constexpr double kDiagonal = std::numbers::sqrt2;

    auto relax = [&](int x, int y) {
        const std::size_t p = cost.index(x, y);
        if (is_seed[p])
            return false;
        double best = dist[p];
        for (const auto& o : kOffsets) {
            const int qx = x + o[0], qy = y + o[1];
            if (qx < 0 || qy < 0 || qx >= w || qy >= h)
                continue;
            const std::size_t q = cost.index(qx, qy);
            if (dist[q] == kInfinity)
                continue;
            const double step = 0.5 * (node[p] + node[q]) * ((o[0] != 0 && o[1] != 0) ? kDiagonal : 1.0);
            best = std::min(best, dist[q] + step);
        }
        if (best < dist[p]) {
            dist[p] = best;
            return true;
        }
        return false;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int order = 0; order < 4; ++order) {
            const bool x_rev = order & 1, y_rev = order & 2;
            for (int j = 0; j < h; ++j) {
                const int y = y_rev ? h - 1 - j : j;
                for (int i = 0; i < w; ++i) {
                    const int x = x_rev ? w - 1 - i : i;
                    changed |= relax(x, y);
                }
            }
        }
    }
    return dist;
}

double person_probability(double background_logit, double person_logit) {
    if (person_logit >= background_logit)
        return 1.0 / (1.0 + std::exp(background_logit - person_logit));
    const double e = std::exp(person_logit - background_logit);
    return e / (1.0 + e);
}

ScoreMap cascade_head(const SegLogits& logits, const KeypointHeatmap& heat,
                      const CascadeWeights& weights) {
    if (logits.width != heat.width || logits.height != heat.height ||
        logits.values.size() != static_cast<std::size_t>(logits.width) * logits.height * 2)
        throw std::invalid_argument("cascade_head: dimension mismatch");
    ScoreMap out(logits.width, logits.height);
    const auto pixels = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < pixels; ++p) {
        const auto i = static_cast<std::size_t>(p);
        double shape = 0.0;
        for (int k = 0; k < kNumJoints; ++k)
            shape += weights.heat_weights[k] * heat.channels[k][i];
        const double fused = logits.person(i) + weights.shape_weight * shape;
        out[i] = person_probability(logits.background(i), fused);
    }
    return out;
}

double instance_confidence(const InstanceHeatmap& heat, const InstanceLabeling& labeling, int label) {
    if (label < 1 || label > heat.instance_count())
        throw std::invalid_argument("instance_confidence: label out of range");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < labeling.size(); ++p) {
        if (labeling[p] != label)
            continue;
        sum += heat.pixel(p)[label - 1];
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

BinaryMask instance_mask(const InstanceLabeling& labeling, int label) {
    BinaryMask mask(labeling.width(), labeling.height(), 0);
    for (std::size_t p = 0; p < labeling.size(); ++p)
        mask[p] = labeling[p] == label ? 1 : 0;
    return mask;
}

}  // namespace p2i
