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

#include <filesystem>

#include "smarthand/binary_io.hpp"
#include "smarthand/core/frame.hpp"

namespace smarthand::core {

// SHRC recordings, SHCA calibration maps and SHMK hand masks. All formats are
// little-endian and end in a CRC-32 over the preceding bytes; see README.

Bytes encode_recording(const Recording& rec);
Recording decode_recording(std::span<const std::uint8_t> bytes);
void save_recording(const Recording& rec, const std::filesystem::path& path);
Recording load_recording(const std::filesystem::path& path);

Bytes encode_calibration(const CalibrationMap& calib);
CalibrationMap decode_calibration(std::span<const std::uint8_t> bytes);
void save_calibration(const CalibrationMap& calib, const std::filesystem::path& path);
CalibrationMap load_calibration(const std::filesystem::path& path);

Bytes encode_hand_mask(const Grid<bool>& active);
HandMask decode_hand_mask(std::span<const std::uint8_t> bytes);
void save_hand_mask(const Grid<bool>& active, const std::filesystem::path& path);
HandMask load_hand_mask(const std::filesystem::path& path);

}  // namespace smarthand::core
