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

#include <cstdint>
#include <span>

#include "smarthand/nn/kernels.hpp"
#include "smarthand/nn/tensor.hpp"

namespace smarthand::nn {

inline constexpr std::int32_t kQ15One = 32768;

// Rounds half away from zero, saturating to [-32768, 32767].
std::int16_t saturate_q15(double code);

// code = sat(round(x / scale * 32768)). Throws ScaleOverflow for non-positive
// or non-finite scales.
QTensor quantize_q15(const Tensor& t, float scale);
std::int16_t quantize_q15(float x, float scale);
Tensor dequantize(const QTensor& q);
inline float dequantize(std::int16_t code, float scale) { return static_cast<float>(code) * scale / kQ15One; }

// Smallest power of two >= max|x| (at least 2^-20), used as a tensor scale.
float power_of_two_scale(std::span<const float> values);

// Fixed-point rescale of a wide accumulator: y = sat(round(acc * real)), with
// real = multiplier * 2^-shift and multiplier in [2^30, 2^31). The product is
// taken in 128 bits and shifted right with round-half-away-from-zero. For
// power-of-two real multipliers this is an exact rounding shift.
struct Requantizer {
  std::int32_t multiplier = 1 << 30;
  int shift = 30;

  // Throws ScaleOverflow if `real` is not positive and finite.
  static Requantizer from_real(double real);
  std::int16_t apply(std::int64_t acc) const;
  std::int64_t apply_wide(std::int64_t acc) const;
};

// Q15 weights and accumulator-domain bias for one conv / FC layer.
struct QuantizedLinear {
  std::vector<std::int16_t> weights;
  std::vector<std::int64_t> bias;  // in units of in_scale * weight_scale / 2^30
  float weight_scale = 1.0f;
  float in_scale = 1.0f;
  float out_scale = 1.0f;
  Requantizer requant;
};

QuantizedLinear quantize_linear(std::span<const float> weights, std::span<const float> bias, float in_scale,
                                float out_scale);

// Q15 convolution: 16x16-bit products accumulated in 64 bits, bias added in
// accumulator units, then requantized to the output scale.
namespace serial {
void conv2d_q15(std::span<const std::int16_t> in, const Shape& in_shape, const QuantizedLinear& layer,
                const ConvGeometry& geom, std::span<std::int16_t> out);
void fully_connected_q15(std::span<const std::int16_t> in, const QuantizedLinear& layer, std::size_t out_features,
                         std::span<std::int16_t> out);
}  // namespace serial

void conv2d_q15(std::span<const std::int16_t> in, const Shape& in_shape, const QuantizedLinear& layer,
                const ConvGeometry& geom, std::span<std::int16_t> out);
void fully_connected_q15(std::span<const std::int16_t> in, const QuantizedLinear& layer, std::size_t out_features,
                         std::span<std::int16_t> out);

// Tensor-level helpers quantizing weights on the fly.
QTensor conv2d_q15(const QTensor& in, std::span<const float> weights, std::span<const float> bias,
                   const ConvGeometry& geom, float out_scale, MaccCounter* counter = nullptr);
QTensor fully_connected_q15(const QTensor& in, std::span<const float> weights, std::span<const float> bias,
                            std::size_t out_features, float out_scale, MaccCounter* counter = nullptr);

void relu_q15_inplace(std::span<std::int16_t> x);
void maxpool_q15(std::span<const std::int16_t> in, const Shape& in_shape, std::size_t window,
                 std::span<std::int16_t> out);
// Rescales codes from one scale to another with saturation.
void rescale_q15(std::span<const std::int16_t> in, float in_scale, float out_scale, std::span<std::int16_t> out);
void residual_add_q15(std::span<const std::int16_t> a, float a_scale, std::span<const std::int16_t> b, float b_scale,
                      float out_scale, std::span<std::int16_t> out);
void global_avg_pool_q15(std::span<const std::int16_t> in, const Shape& in_shape, float in_scale, float out_scale,
                         std::span<std::int16_t> out);

}  // namespace smarthand::nn
