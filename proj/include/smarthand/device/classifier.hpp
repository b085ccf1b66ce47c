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

#include <memory>
#include <optional>

#include "smarthand/device/device.hpp"
#include "smarthand/nn/engine.hpp"
#include "smarthand/nn/imu.hpp"

namespace smarthand::device {

InferencePayload to_payload(const nn::InferenceResult& result);

// Classifier running `model` in a private context (Q15 when `quant` is given).
// The model must outlive the classifier. IMU samples feed the fusion branch
// when the graph has one.
Classifier make_classifier(const nn::Model& model, std::optional<nn::QuantParams> quant = std::nullopt,
                           nn::ImuFeatures features = nn::ImuFeatures::Euler);

}  // namespace smarthand::device
