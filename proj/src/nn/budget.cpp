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

#include "smarthand/nn/budget.hpp"

#include <algorithm>
#include <numeric>

#include "smarthand/error.hpp"
#include "smarthand/nn/kernels.hpp"

namespace smarthand::nn {

std::uint64_t layer_macc(const ModelGraph& graph, std::size_t i) {
  const Layer& l = graph.layer(i);
  if (l.kind == LayerKind::Conv) {
    const ConvGeometry g{l.out_channels, l.kernel, l.stride, l.pad};
    return g.macc(graph.layer(l.inputs[0]).output);
  }
  if (l.kind == LayerKind::FullyConnected)
    return std::uint64_t{graph.layer(l.inputs[0]).output.size()} * l.out_channels;
  return 0;
}

std::uint64_t count_macc(const ModelGraph& graph) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < graph.size(); ++i) total += layer_macc(graph, i);
  return total;
}

std::size_t count_param_bytes(const ModelGraph& graph) {
  std::size_t n = 0;
  for (const auto& l : graph.layers()) {
    const std::size_t in = l.inputs.empty() ? 0 : graph.layer(l.inputs[0]).output.size();
    switch (l.kind) {
      case LayerKind::Conv:
        n += l.out_channels * graph.layer(l.inputs[0]).output.c * l.kernel * l.kernel + l.out_channels;
        break;
      case LayerKind::BatchNorm: n += 4 * l.output.c; break;
      case LayerKind::FullyConnected: n += l.out_channels * in + l.out_channels; break;
      default: break;
    }
  }
  return n * sizeof(float);
}

std::size_t element_bytes(DType dtype) {
  switch (dtype) {
    case DType::F32: return 4;
    case DType::Q15:
    case DType::U16: return 2;
  }
  return 4;
}

bool runs_in_place(const ModelGraph& graph, std::size_t i) {
  const Layer& l = graph.layer(i);
  if (l.kind != LayerKind::BatchNorm && l.kind != LayerKind::Relu && l.kind != LayerKind::Softmax) return false;
  return graph.consumers(l.inputs.at(0)).size() == 1;
}

bool ArenaPlan::aliases_input(const ModelGraph& graph, std::size_t i) const {
  const Layer& l = graph.layer(i);
  return !l.inputs.empty() && layer_tensor[i] == layer_tensor[l.inputs[0]];
}

ArenaPlan plan_memory(const ModelGraph& graph, DType dtype) {
  ArenaPlan plan;
  const std::size_t n = graph.size();
  plan.layer_tensor.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Layer& l = graph.layer(i);
    if (runs_in_place(graph, i)) {
      const auto t = plan.layer_tensor[l.inputs[0]];
      plan.layer_tensor[i] = t;
      plan.tensors[t].last = i;
      continue;
    }
    const std::size_t raw = l.output.size() * element_bytes(dtype);
    const std::size_t size = (raw + kArenaAlignment - 1) / kArenaAlignment * kArenaAlignment;
    plan.layer_tensor[i] = plan.tensors.size();
    plan.tensors.push_back({l.name, 0, size, i, i});
    for (auto src : l.inputs) {
      auto& t = plan.tensors[plan.layer_tensor[src]];
      t.last = std::max(t.last, i);
    }
  }
  plan.tensors[plan.layer_tensor[graph.output()]].last = n - 1;

  std::vector<std::size_t> order(plan.tensors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return plan.tensors[a].size > plan.tensors[b].size; });

  std::vector<std::size_t> placed;
  for (auto idx : order) {
    auto& t = plan.tensors[idx];
    std::vector<std::pair<std::size_t, std::size_t>> busy;  // [begin, end) of conflicting buffers
    for (auto p : placed) {
      const auto& o = plan.tensors[p];
      if (o.first <= t.last && t.first <= o.last) busy.emplace_back(o.offset, o.offset + o.size);
    }
    std::sort(busy.begin(), busy.end());
    std::size_t offset = 0;
    for (const auto& [b, e] : busy) {
      if (offset + t.size <= b) break;
      offset = std::max(offset, e);
    }
    t.offset = offset;
    plan.peak_bytes = std::max(plan.peak_bytes, offset + t.size);
    placed.push_back(idx);
  }
  return plan;
}

}  // namespace smarthand::nn
