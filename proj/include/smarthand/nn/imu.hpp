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
#include <string_view>

#include "smarthand/core/frame.hpp"

namespace smarthand::nn {

inline constexpr double kAccelLsbPerG = 16384.0;     // +-2 g range
inline constexpr double kGyroLsbPerDps = 131.0;      // +-250 deg/s range

// Fusion-branch input derived from one IMU sample.
enum class ImuFeatures {
  Euler,  // roll, pitch from the gravity vector, yaw 0 (no magnetometer); radians
  Accel,  // acceleration in g
  Gyro,   // angular rate in rad/s
};

std::array<float, 3> imu_features(const core::ImuSample& sample, ImuFeatures kind = ImuFeatures::Euler);

// "euler", "accel", "gyro"; throws Usage otherwise.
ImuFeatures parse_imu_features(std::string_view name);

}  // namespace smarthand::nn
