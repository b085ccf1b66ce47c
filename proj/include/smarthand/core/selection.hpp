/* Copyright 2026 The SmartHand Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <vector>

#include "smarthand/core/frame.hpp"

namespace smarthand::core {

// Indices (into rec.frames) of frames passing is_valid_frame with cfg.min_supra_taxels.
std::vector<std::size_t> valid_frame_indices(const Recording& rec, const CalibrationMap& calib,
                                             std::uint32_t min_supra_taxels);

// Picks cfg.n valid frames from the recording.
//
// Random draws without replacement from a generator seeded with cfg.seed and
// returns frames in recording order. Cluster runs k-means (k = cfg.n) over the
// valid frames restricted to the masked taxels, seeded by k-means++ from
// cfg.seed, and returns for every centroid the closest not-yet-chosen valid
// frame, in centroid order.
//
// Throws NotEnoughValidFrames when fewer than cfg.n frames are valid.
std::vector<TactileFrame> select_frames(const Recording& rec, const CalibrationMap& calib,
                                        const SelectionConfig& cfg, const HandMask& mask);

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignment;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kKMeansMaxIterations = 100;

// Lloyd's algorithm with deterministic k-means++ seeding, squared Euclidean distance.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations = kKMeansMaxIterations);

}  // namespace smarthand::core
