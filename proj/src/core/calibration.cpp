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

#include "smarthand/core/calibration.hpp"

#include <algorithm>

#include "smarthand/error.hpp"

namespace smarthand::core {

CalibrationMap compute_thresholds(std::span<const TactileFrame> empty_frames) {
  if (empty_frames.empty()) throw Error(ErrorKind::EmptyInput, "no empty-hand frames to calibrate from");
  CalibrationMap calib;
  for (const auto& frame : empty_frames)
    for (std::size_t i = 0; i < kTaxels; ++i) calib.thresholds[i] = std::max(calib.thresholds[i], frame.values[i]);
  calib.source_frame_count = static_cast<std::uint32_t>(empty_frames.size());
  return calib;
}

CalibrationMap merge(const CalibrationMap& a, const CalibrationMap& b) {
  CalibrationMap out;
  for (std::size_t i = 0; i < kTaxels; ++i) out.thresholds[i] = std::max(a.thresholds[i], b.thresholds[i]);
  out.source_frame_count = a.source_frame_count + b.source_frame_count;
  return out;
}

std::size_t supra_threshold_count(const TactileFrame& frame, const CalibrationMap& calib) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < kTaxels; ++i) count += frame.values[i] > calib.thresholds[i];
  return count;
}

bool is_valid_frame(const TactileFrame& frame, const CalibrationMap& calib, std::uint32_t k) {
  return supra_threshold_count(frame, calib) >= std::max<std::uint32_t>(k, 1);
}

NormalizedFrame normalize_frame(const TactileFrame& frame) {
  NormalizedFrame out;
  for (std::size_t i = 0; i < kTaxels; ++i) out[i] = static_cast<float>(frame.values[i]) / float{kAdcMax};
  return out;
}

NormalizedFrame normalize_frame_baseline(const TactileFrame& frame, const CalibrationMap& calib) {
  NormalizedFrame out;
  for (std::size_t i = 0; i < kTaxels; ++i) {
    const int excess = int{frame.values[i]} - int{calib.thresholds[i]};
    out[i] = excess > 0 ? static_cast<float>(excess) / float{kAdcMax} : 0.0f;
  }
  return out;
}

}  // namespace smarthand::core
