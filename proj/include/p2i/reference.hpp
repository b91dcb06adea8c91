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

#ifndef P2I_REFERENCE_HPP_
#define P2I_REFERENCE_HPP_

// Straightforward serial versions of the parallel kernels. Tests compare
// the kernels against these; the benchmark times both.

#include <span>

#include "p2i/fusion.hpp"
#include "p2i/graph.hpp"
#include "p2i/imageops.hpp"
#include "p2i/pose_prior.hpp"

namespace p2i::reference {

/// Explicit 3x3 convolution with clamped indices.
GradientMap sobel_magnitude(const GrayImage& image);

/// Classic center-major SLIC assignment loop.
SuperpixelLabeling slic(const RgbImage& image, const SlicParams& params);

/// Textbook triple loop, no capacity check.
DistanceTable floyd_warshall(const Rag& g);

PoseInstanceMap pose_instance_map(std::span<const DistanceField> fields,
                                  const SuperpixelLabeling& labeling, double temperature);

InstanceHeatmap fuse(const PoseInstanceMap& prior, const ScoreMap& score);

InstanceLabeling label_instances(const InstanceHeatmap& heat, const ScoreMap& score,
                                 double background_threshold);

}  // namespace p2i::reference

#endif  // P2I_REFERENCE_HPP_
