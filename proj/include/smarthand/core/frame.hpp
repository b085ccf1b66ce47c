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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace smarthand::core {

inline constexpr std::size_t kRows = 32;
inline constexpr std::size_t kCols = 32;
inline constexpr std::size_t kTaxels = kRows * kCols;
inline constexpr std::uint16_t kAdcMax = 4095;
inline constexpr std::size_t kHandTaxels = 548;
inline constexpr std::size_t kClassCount = 17;
inline constexpr std::uint8_t kEmptyHandLabel = 16;
inline constexpr std::uint8_t kSessionCount = 5;

template <typename T>
using Grid = std::array<T, kTaxels>;

constexpr std::size_t taxel_index(std::size_t row, std::size_t col) { return row * kCols + col; }

// One 32x32 readout of 12-bit ADC codes, row-major.
struct TactileFrame {
  Grid<std::uint16_t> values{};
  std::uint32_t seq = 0;
  std::uint64_t timestamp_us = 0;

  std::uint16_t at(std::size_t row, std::size_t col) const { return values[taxel_index(row, col)]; }
  std::uint16_t& at(std::size_t row, std::size_t col) { return values[taxel_index(row, col)]; }
  // True when every code is within the 12-bit range.
  bool in_range() const;

  friend bool operator==(const TactileFrame&, const TactileFrame&) = default;
};

struct ImuSample {
  std::array<std::int16_t, 3> accel{};
  std::array<std::int16_t, 3> gyro{};
  std::uint64_t timestamp_us = 0;

  friend bool operator==(const ImuSample&, const ImuSample&) = default;
};

// Physical crossings of the glove. Always exactly kHandTaxels active entries.
class HandMask {
 public:
  // Throws MaskCountMismatch unless exactly kHandTaxels entries are set.
  static HandMask from_grid(const Grid<bool>& active);

  bool active(std::size_t row, std::size_t col) const { return active_[taxel_index(row, col)]; }
  bool active(std::size_t index) const { return active_[index]; }
  const Grid<bool>& grid() const { return active_; }
  // Row-major indices of active taxels.
  const std::vector<std::size_t>& indices() const { return indices_; }

  friend bool operator==(const HandMask& a, const HandMask& b) { return a.active_ == b.active_; }

 private:
  HandMask() = default;
  Grid<bool> active_{};
  std::vector<std::size_t> indices_;
};

struct CalibrationMap {
  Grid<std::uint16_t> thresholds{};
  std::uint32_t source_frame_count = 0;

  friend bool operator==(const CalibrationMap&, const CalibrationMap&) = default;
};

struct Recording {
  std::uint8_t label_id = 0;
  std::uint8_t session_id = 0;
  std::uint16_t rate_hz = 100;
  std::vector<TactileFrame> frames;
  std::vector<ImuSample> imu;

  friend bool operator==(const Recording&, const Recording&) = default;
};

// Throws FileFormat describing the first broken Recording invariant.
void validate(const Recording& rec);

enum class SelectionStrategy { Random, Cluster };

struct SelectionConfig {
  std::size_t n = 1;
  SelectionStrategy strategy = SelectionStrategy::Random;
  std::uint64_t seed = 0;
  std::uint32_t min_supra_taxels = 1;
};

}  // namespace smarthand::core
