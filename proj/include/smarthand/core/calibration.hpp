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

#include <span>

#include "smarthand/core/frame.hpp"

namespace smarthand::core {

// Per-taxel maximum over touchless frames. Throws EmptyInput on an empty list.
CalibrationMap compute_thresholds(std::span<const TactileFrame> empty_frames);

// Elementwise max of two maps; frame counts add. Equivalent to thresholding
// the concatenated frame sets.
CalibrationMap merge(const CalibrationMap& a, const CalibrationMap& b);

// Number of taxels strictly above their threshold.
std::size_t supra_threshold_count(const TactileFrame& frame, const CalibrationMap& calib);

// A frame is valid when at least k taxels exceed their threshold (k >= 1).
bool is_valid_frame(const TactileFrame& frame, const CalibrationMap& calib, std::uint32_t k = 1);

using NormalizedFrame = Grid<float>;

// Maps codes onto [0, 1] by the full ADC range.
NormalizedFrame normalize_frame(const TactileFrame& frame);
// Experimental: codes above the per-taxel threshold only, still scaled by the ADC range.
NormalizedFrame normalize_frame_baseline(const TactileFrame& frame, const CalibrationMap& calib);

}  // namespace smarthand::core
