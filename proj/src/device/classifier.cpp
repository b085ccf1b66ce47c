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

#include "smarthand/device/classifier.hpp"

namespace smarthand::device {

InferencePayload to_payload(const nn::InferenceResult& result) {
  InferencePayload p;
  p.class_id = static_cast<std::uint8_t>(result.top1());
  for (std::size_t i = 0; i < p.top3.size() && i < result.top_k.size(); ++i) {
    p.top3[i] = static_cast<std::uint8_t>(result.top_k[i].id);
    p.probs[i] = result.top_k[i].prob;
  }
  return p;
}

Classifier make_classifier(const nn::Model& model, std::optional<nn::QuantParams> quant, nn::ImuFeatures features) {
  auto ctx = quant ? std::make_shared<nn::InferenceContext>(model, std::move(*quant))
                   : std::make_shared<nn::InferenceContext>(model);
  const bool fused = model.graph().imu_input().has_value();
  return [ctx, fused, features](const core::TactileFrame& frame, const core::ImuSample& imu) {
    std::optional<std::array<float, 3>> v;
    if (fused) v = nn::imu_features(imu, features);
    return to_payload(ctx->run(frame, v));
  };
}

}  // namespace smarthand::device
