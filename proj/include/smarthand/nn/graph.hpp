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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smarthand/nn/tensor.hpp"

namespace smarthand::nn {

enum class LayerKind { Input, Conv, BatchNorm, Relu, MaxPool, Add, GlobalAvgPool, Concat, FullyConnected, Softmax };

std::string_view to_string(LayerKind kind);

struct Layer {
  LayerKind kind = LayerKind::Input;
  std::string name;
  std::vector<std::size_t> inputs;  // indices of producer layers
  Shape output;                     // filled by shape inference

  // Conv
  std::size_t out_channels = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;
  // MaxPool
  std::size_t pool = 2;
  // BatchNorm
  float eps = 1e-5f;
  // FullyConnected: out_channels is the output width.

  bool has_parameters() const {
    return kind == LayerKind::Conv || kind == LayerKind::BatchNorm || kind == LayerKind::FullyConnected;
  }
};

// Layer list in execution order; every layer reads only earlier layers.
// The first Input layer takes the tactile frame, an optional second one the
// 3-d IMU feature vector.
class ModelGraph {
 public:
  // Parses the line-oriented graph format (docs/graph.md) and runs shape
  // inference. Throws FileFormat on syntax errors, ShapeMismatch on bad shapes.
  static ModelGraph parse(std::string_view text);
  static ModelGraph load(const std::filesystem::path& path);
  static ModelGraph from_layers(std::vector<Layer> layers);

  std::string to_text() const;

  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(std::size_t i) const { return layers_[i]; }
  std::size_t size() const { return layers_.size(); }
  std::optional<std::size_t> find(std::string_view name) const;

  std::size_t frame_input() const { return inputs_.at(0); }
  std::optional<std::size_t> imu_input() const {
    return inputs_.size() > 1 ? std::optional<std::size_t>(inputs_[1]) : std::nullopt;
  }
  std::size_t output() const { return layers_.size() - 1; }
  std::size_t class_count() const { return layers_.back().output.size(); }
  std::size_t residual_add_count() const;

  // Layers consuming layer i's output.
  std::vector<std::size_t> consumers(std::size_t i) const;

 private:
  void infer_shapes();
  std::vector<Layer> layers_;
  std::vector<std::size_t> inputs_;
};

// Reduced ResNet-style classifier for one 1x32x32 frame: two 3x3 stem convs,
// max-pool, two basic residual blocks (the second strided with a 1x1
// projection), global average pool, FC to 17 classes. With `with_imu`, a
// 3->30->3 MLP on the IMU vector is concatenated to the pooled features.
std::string_view reference_graph_text(bool with_imu = false);
ModelGraph reference_graph(bool with_imu = false);

}  // namespace smarthand::nn
