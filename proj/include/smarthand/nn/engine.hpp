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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "smarthand/core/frame.hpp"
#include "smarthand/nn/budget.hpp"
#include "smarthand/nn/graph.hpp"
#include "smarthand/nn/kernels.hpp"
#include "smarthand/nn/q15.hpp"
#include "smarthand/nn/weights.hpp"

namespace smarthand::nn {

struct ModelOptions {
  // Fold each BN into the conv feeding it when that conv has no other consumer.
  bool fold_batchnorm = true;
};

struct RankedClass {
  std::size_t id = 0;
  float prob = 0.0f;
};

struct InferenceResult {
  std::vector<float> logits;
  std::vector<float> probs;
  std::vector<RankedClass> top_k;  // descending probability, ties by lower id

  std::size_t top1() const { return top_k.at(0).id; }
};

std::vector<RankedClass> rank_classes(std::span<const float> probs, std::size_t k);

// Immutable after construction; share freely across threads.
class Model {
 public:
  // Throws WeightMismatch / NonPositiveVariance.
  Model(ModelGraph graph, WeightStore weights, ModelOptions options = {});

  const ModelGraph& graph() const { return graph_; }
  const WeightStore& weights() const { return weights_; }
  const ModelOptions& options() const { return options_; }

  // Prepared F32 parameters for conv / FC layers (BN already folded in when
  // the layer absorbed one).
  std::span<const float> layer_weights(std::size_t layer) const { return params_[layer].weights; }
  std::span<const float> layer_bias(std::size_t layer) const { return params_[layer].bias; }
  // BN layers folded into their conv run as identities.
  bool is_folded(std::size_t layer) const { return params_[layer].folded; }
  // Per-channel affine of an unfolded BN layer.
  std::span<const float> bn_scale(std::size_t layer) const { return params_[layer].scale; }
  std::span<const float> bn_shift(std::size_t layer) const { return params_[layer].shift; }

 private:
  struct Params {
    std::vector<float> weights, bias, scale, shift;
    bool folded = false;
  };
  ModelGraph graph_;
  WeightStore weights_;
  ModelOptions options_;
  std::vector<Params> params_;
};

// Per-layer power-of-two activation scales plus the Q15 weights derived from
// them. Layers that run in place keep their input's scale.
struct QuantParams {
  std::vector<float> scales;
  std::vector<QuantizedLinear> linear;  // empty entries for non conv/FC layers
};

struct InferenceInput {
  const core::TactileFrame* frame = nullptr;
  std::optional<std::array<float, 3>> imu;
};

// Runs F32 over `frames` and derives the scales from the observed ranges.
QuantParams calibrate_q15(const Model& model, std::span<const InferenceInput> frames);

// Called after each layer with the layer's output, dequantized in Q15 mode.
using LayerObserver = std::function<void(std::size_t layer, const Tensor& output)>;

// Private per-inference state: activation arena sized by plan_memory and a
// MACC counter. Not shareable concurrently; movable between threads.
class InferenceContext {
 public:
  explicit InferenceContext(const Model& model);
  InferenceContext(const Model& model, QuantParams quant);

  InferenceResult run(const core::TactileFrame& frame, std::optional<std::array<float, 3>> imu = std::nullopt);

  DType dtype() const { return quant_ ? DType::Q15 : DType::F32; }
  const ArenaPlan& plan() const { return plan_; }
  std::uint64_t macc() const { return counter_.value; }
  void reset_macc() { counter_.value = 0; }
  void set_observer(LayerObserver observer) { observer_ = std::move(observer); }

 private:
  struct FreeDeleter {
    void operator()(std::byte* p) const;
  };

  template <typename T>
  std::span<T> buffer(std::size_t layer);
  void run_f32(const core::TactileFrame& frame, const std::optional<std::array<float, 3>>& imu);
  void run_q15(const core::TactileFrame& frame, const std::optional<std::array<float, 3>>& imu);
  InferenceResult finish();
  void notify(std::size_t layer);

  const Model* model_;
  std::optional<QuantParams> quant_;
  ArenaPlan plan_;
  std::unique_ptr<std::byte[], FreeDeleter> arena_;
  MaccCounter counter_;
  LayerObserver observer_;
  std::vector<float> logits_;
};

InferenceResult infer(const Model& model, const core::TactileFrame& frame,
                      std::optional<std::array<float, 3>> imu = std::nullopt);
InferenceResult infer(const ModelGraph& graph, const WeightStore& weights, const core::TactileFrame& frame,
                      std::optional<std::array<float, 3>> imu = std::nullopt);

}  // namespace smarthand::nn
