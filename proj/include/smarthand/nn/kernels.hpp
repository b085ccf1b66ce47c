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
#include <vector>

#include "smarthand/nn/tensor.hpp"

namespace smarthand::nn {

struct ConvGeometry {
  std::size_t out_channels = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;

  Shape output_shape(const Shape& in) const;
  // outH * outW * outC * inC * k^2
  std::uint64_t macc(const Shape& in) const;
};

// Running multiply-accumulate count for a private inference context.
struct MaccCounter {
  std::uint64_t value = 0;
};

// Raw kernels over contiguous CHW buffers. Output buffers are fully overwritten.
// Weights are [out][in][k][k] for convolutions and [out][in] for FC layers.
namespace serial {
void conv2d(std::span<const float> in, const Shape& in_shape, std::span<const float> weights,
            std::span<const float> bias, const ConvGeometry& geom, std::span<float> out);
void fully_connected(std::span<const float> in, std::span<const float> weights, std::span<const float> bias,
                     std::size_t out_features, std::span<float> out);
}  // namespace serial

// OpenMP variants (parallel over output channels / features). Same results as
// serial:: up to floating-point summation order.
void conv2d(std::span<const float> in, const Shape& in_shape, std::span<const float> weights,
            std::span<const float> bias, const ConvGeometry& geom, std::span<float> out);
void fully_connected(std::span<const float> in, std::span<const float> weights, std::span<const float> bias,
                     std::size_t out_features, std::span<float> out);

void relu_inplace(std::span<float> x);
void maxpool(std::span<const float> in, const Shape& in_shape, std::size_t window, std::span<float> out);
void global_avg_pool(std::span<const float> in, const Shape& in_shape, std::span<float> out);
void residual_add(std::span<const float> a, std::span<const float> b, std::span<float> out);
// Max-subtracted softmax; `in` and `out` may alias.
void softmax(std::span<const float> in, std::span<float> out);
// Per-channel y = x * scale[c] + shift[c], in place.
void channel_affine_inplace(std::span<float> x, const Shape& shape, std::span<const float> scale,
                            std::span<const float> shift);

// Tensor-level wrappers. Throw ShapeMismatch on inconsistent operands; the
// conv/FC wrappers add their MACC count to `counter` when given.
Tensor conv2d(const Tensor& in, std::span<const float> weights, std::span<const float> bias,
              const ConvGeometry& geom, MaccCounter* counter = nullptr);
Tensor fully_connected(const Tensor& in, std::span<const float> weights, std::span<const float> bias,
                       std::size_t out_features, MaccCounter* counter = nullptr);
Tensor relu(Tensor x);
Tensor maxpool2(const Tensor& in);
Tensor global_avg_pool(const Tensor& in);
Tensor residual_add(const Tensor& a, const Tensor& b);
Tensor softmax(const Tensor& logits);
Tensor concat(std::span<const Tensor> parts);

struct BatchNormParams {
  std::vector<float> gamma, beta, mean, var;
  float eps = 1e-5f;
};

// Per-channel inference-time scale/shift equivalent to `bn`.
// Throws NonPositiveVariance when a running variance is <= 0.
void batchnorm_affine(const BatchNormParams& bn, std::vector<float>& scale, std::vector<float>& shift);

struct FoldedConv {
  std::vector<float> weights;
  std::vector<float> bias;
};

// Folds BN into the preceding convolution so conv' == bn(conv(.)).
FoldedConv batchnorm_fold(const BatchNormParams& bn, std::span<const float> conv_weights,
                          std::span<const float> conv_bias);

struct MlpWeights {
  std::vector<float> w1, b1;  // 30x3, 30
  std::vector<float> w2, b2;  // 3x30, 3
};

// FC(3->30) + ReLU + FC(30->3). Throws ShapeMismatch on wrong weight sizes.
std::vector<float> mlp_forward(std::span<const float> imu_features, const MlpWeights& weights,
                               MaccCounter* counter = nullptr);

}  // namespace smarthand::nn
