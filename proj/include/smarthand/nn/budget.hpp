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
#include <string>
#include <vector>

#include "smarthand/nn/graph.hpp"
#include "smarthand/nn/tensor.hpp"

namespace smarthand::nn {

// Conv and FC multiply-accumulates only; pooling, BN and elementwise layers
// count zero.
std::uint64_t layer_macc(const ModelGraph& graph, std::size_t layer);
std::uint64_t count_macc(const ModelGraph& graph);

// Bytes of F32 parameters the graph needs (weights + biases + BN statistics).
std::size_t count_param_bytes(const ModelGraph& graph);

inline constexpr std::size_t kArenaAlignment = 8;

struct ArenaTensor {
  std::string name;  // layer that first writes the buffer
  std::size_t offset = 0;
  std::size_t size = 0;
  std::size_t first = 0;  // layer index of the first write
  std::size_t last = 0;   // layer index of the last read or write
};

struct ArenaPlan {
  std::vector<ArenaTensor> tensors;
  std::vector<std::size_t> layer_tensor;  // layer index -> index into tensors
  std::size_t peak_bytes = 0;

  bool aliases_input(const ModelGraph& graph, std::size_t layer) const;
};

// True if `layer` writes its result over its (sole) input buffer: BN, ReLU and
// Softmax whose producer has no other consumer.
bool runs_in_place(const ModelGraph& graph, std::size_t layer);

// Static activation plan. Buffers are live from their first writer to their
// last reader (the graph output to the end) and are placed largest first at
// the lowest offset not overlapping any placed buffer with an intersecting
// live range. Sizes are rounded up to kArenaAlignment.
ArenaPlan plan_memory(const ModelGraph& graph, DType dtype = DType::F32);

std::size_t element_bytes(DType dtype);

}  // namespace smarthand::nn
