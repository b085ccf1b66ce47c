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

#include "smarthand/nn/imu.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "smarthand/error.hpp"

namespace smarthand::nn {

std::array<float, 3> imu_features(const core::ImuSample& s, ImuFeatures kind) {
  const double ax = s.accel[0] / kAccelLsbPerG, ay = s.accel[1] / kAccelLsbPerG, az = s.accel[2] / kAccelLsbPerG;
  switch (kind) {
    case ImuFeatures::Euler:
      return {static_cast<float>(std::atan2(ay, az)), static_cast<float>(std::atan2(-ax, std::hypot(ay, az))), 0.0f};
    case ImuFeatures::Accel: return {static_cast<float>(ax), static_cast<float>(ay), static_cast<float>(az)};
    case ImuFeatures::Gyro: {
      std::array<float, 3> out{};
      for (int i = 0; i < 3; ++i)
        out[i] = static_cast<float>(s.gyro[i] / kGyroLsbPerDps * std::numbers::pi / 180.0);
      return out;
    }
  }
  return {};
}

ImuFeatures parse_imu_features(std::string_view name) {
  if (name == "euler") return ImuFeatures::Euler;
  if (name == "accel") return ImuFeatures::Accel;
  if (name == "gyro") return ImuFeatures::Gyro;
  throw Error(ErrorKind::Usage, "unknown IMU feature set '" + std::string(name) + "' (euler|accel|gyro)");
}

}  // namespace smarthand::nn
