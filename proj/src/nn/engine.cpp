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

#include "smarthand/nn/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numeric>

#include "smarthand/core/calibration.hpp"
#include "smarthand/error.hpp"

namespace smarthand::nn {
namespace {

constexpr std::size_t kArenaAlign = 64;

ConvGeometry geometry(const Layer& l) { return {l.out_channels, l.kernel, l.stride, l.pad}; }

// Index of the layer feeding a final softmax, or the output itself.
std::size_t logits_layer(const ModelGraph& g) {
  const Layer& out = g.layer(g.output());
  return out.kind == LayerKind::Softmax ? out.inputs[0] : g.output();
}

}  // namespace

std::vector<RankedClass> rank_classes(std::span<const float> probs, std::size_t k) {
  std::vector<std::size_t> ids(probs.size());
  std::iota(ids.begin(), ids.end(), 0);
  k = std::min(k, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(),
                    [&](std::size_t a, std::size_t b) { return probs[a] > probs[b] || (probs[a] == probs[b] && a < b); });
  std::vector<RankedClass> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({ids[i], probs[ids[i]]});
  return out;
}

Model::Model(ModelGraph graph, WeightStore weights, ModelOptions options)
    : graph_(std::move(graph)), weights_(std::move(weights)), options_(options), params_(graph_.size()) {
  validate_weights(graph_, weights_);
  for (std::size_t i = 0; i < graph_.size(); ++i) {
    const Layer& l = graph_.layer(i);
    auto& p = params_[i];
    if (l.kind == LayerKind::Conv || l.kind == LayerKind::FullyConnected) {
      p.weights = weights_.at(l.name + ".weight").f32();
      p.bias = weights_.at(l.name + ".bias").f32();
    } else if (l.kind == LayerKind::BatchNorm) {
      const auto bn = batchnorm_params(weights_, l);
      const std::size_t src = l.inputs[0];
      const bool foldable = options_.fold_batchnorm && graph_.layer(src).kind == LayerKind::Conv &&
                            graph_.consumers(src).size() == 1;
      if (foldable) {
        auto folded = batchnorm_fold(bn, params_[src].weights, params_[src].bias);
        params_[src].weights = std::move(folded.weights);
        params_[src].bias = std::move(folded.bias);
        p.folded = true;
      } else {
        batchnorm_affine(bn, p.scale, p.shift);
      }
    }
  }
}

QuantParams calibrate_q15(const Model& model, std::span<const InferenceInput> frames) {
  if (frames.empty()) throw Error(ErrorKind::EmptyInput, "Q15 calibration needs at least one frame");
  const auto& g = model.graph();
  std::vector<float> peak(g.size(), 0.0f);
  InferenceContext ctx(model);
  ctx.set_observer([&](std::size_t i, const Tensor& t) {
    for (float v : t.data) peak[i] = std::max(peak[i], std::fabs(v));
  });
  for (const auto& in : frames) {
    if (!in.frame) throw Error(ErrorKind::EmptyInput, "calibration input without a frame");
    ctx.run(*in.frame, in.imu);
  }

  QuantParams q;
  q.scales.resize(g.size());
  q.linear.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Layer& l = g.layer(i);
    const float own = power_of_two_scale(std::span<const float>(&peak[i], 1));
    switch (l.kind) {
      case LayerKind::Relu:
      case LayerKind::MaxPool: q.scales[i] = q.scales[l.inputs[0]]; break;
      case LayerKind::BatchNorm: q.scales[i] = model.is_folded(i) ? q.scales[l.inputs[0]] : own; break;
      case LayerKind::Softmax: q.scales[i] = 1.0f; break;
      default: q.scales[i] = own; break;
    }
    if (l.kind == LayerKind::Conv || l.kind == LayerKind::FullyConnected)
      q.linear[i] = quantize_linear(model.layer_weights(i), model.layer_bias(i), q.scales[l.inputs[0]], q.scales[i]);
  }
  return q;
}

void InferenceContext::FreeDeleter::operator()(std::byte* p) const { std::free(p); }

InferenceContext::InferenceContext(const Model& model) : model_(&model) {
  plan_ = plan_memory(model.graph(), DType::F32);
  const std::size_t bytes = (plan_.peak_bytes + kArenaAlign - 1) / kArenaAlign * kArenaAlign;
  arena_.reset(static_cast<std::byte*>(std::aligned_alloc(kArenaAlign, std::max(bytes, kArenaAlign))));
  if (!arena_) throw std::bad_alloc();
}

InferenceContext::InferenceContext(const Model& model, QuantParams quant) : model_(&model), quant_(std::move(quant)) {
  if (quant_->scales.size() != model.graph().size() || quant_->linear.size() != model.graph().size())
    throw Error(ErrorKind::ShapeMismatch, "quantization parameters do not match the graph");
  plan_ = plan_memory(model.graph(), DType::Q15);
  const std::size_t bytes = (plan_.peak_bytes + kArenaAlign - 1) / kArenaAlign * kArenaAlign;
  arena_.reset(static_cast<std::byte*>(std::aligned_alloc(kArenaAlign, std::max(bytes, kArenaAlign))));
  if (!arena_) throw std::bad_alloc();
}

template <typename T>
std::span<T> InferenceContext::buffer(std::size_t layer) {
  const auto& t = plan_.tensors[plan_.layer_tensor[layer]];
  return {reinterpret_cast<T*>(arena_.get() + t.offset), model_->graph().layer(layer).output.size()};
}

void InferenceContext::notify(std::size_t layer) {
  if (!observer_) return;
  const Shape s = model_->graph().layer(layer).output;
  if (quant_) {
    const auto codes = buffer<std::int16_t>(layer);
    Tensor t(s);
    for (std::size_t i = 0; i < codes.size(); ++i) t.data[i] = dequantize(codes[i], quant_->scales[layer]);
    observer_(layer, t);
  } else {
    const auto v = buffer<float>(layer);
    observer_(layer, Tensor(s, std::vector<float>(v.begin(), v.end())));
  }
}

InferenceResult InferenceContext::run(const core::TactileFrame& frame, std::optional<std::array<float, 3>> imu) {
  if (model_->graph().imu_input() && !imu)
    throw Error(ErrorKind::ShapeMismatch, "graph has an IMU branch but no IMU vector was given");
  if (quant_) run_q15(frame, imu);
  else run_f32(frame, imu);
  return finish();
}

void InferenceContext::run_f32(const core::TactileFrame& frame, const std::optional<std::array<float, 3>>& imu) {
  const auto& g = model_->graph();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Layer& l = g.layer(i);
    auto out = buffer<float>(i);
    const auto in = [&](std::size_t k = 0) { return std::span<const float>(buffer<float>(l.inputs[k])); };
    const auto in_shape = [&](std::size_t k = 0) { return g.layer(l.inputs[k]).output; };
    const auto copy_input = [&] {
      const auto src = in();
      if (src.data() != out.data()) std::copy(src.begin(), src.end(), out.begin());
    };
    switch (l.kind) {
      case LayerKind::Input:
        if (i == g.frame_input()) {
          const auto norm = core::normalize_frame(frame);
          std::copy(norm.begin(), norm.end(), out.begin());
        } else {
          std::copy(imu->begin(), imu->end(), out.begin());
        }
        break;
      case LayerKind::Conv:
        conv2d(in(), in_shape(), model_->layer_weights(i), model_->layer_bias(i), geometry(l), out);
        counter_.value += geometry(l).macc(in_shape());
        break;
      case LayerKind::BatchNorm:
        copy_input();
        if (!model_->is_folded(i)) channel_affine_inplace(out, l.output, model_->bn_scale(i), model_->bn_shift(i));
        break;
      case LayerKind::Relu:
        copy_input();
        relu_inplace(out);
        break;
      case LayerKind::MaxPool: maxpool(in(), in_shape(), l.pool, out); break;
      case LayerKind::Add: residual_add(in(0), in(1), out); break;
      case LayerKind::GlobalAvgPool: global_avg_pool(in(), in_shape(), out); break;
      case LayerKind::Concat: {
        std::size_t at = 0;
        for (std::size_t k = 0; k < l.inputs.size(); ++k) {
          const auto part = in(k);
          std::copy(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
          at += part.size();
        }
        break;
      }
      case LayerKind::FullyConnected:
        fully_connected(in(), model_->layer_weights(i), model_->layer_bias(i), l.out_channels, out);
        counter_.value += std::uint64_t{in().size()} * l.out_channels;
        break;
      case LayerKind::Softmax: softmax(in(), out); break;
    }
    notify(i);
    if (i == logits_layer(g)) logits_.assign(out.begin(), out.end());
  }
}

void InferenceContext::run_q15(const core::TactileFrame& frame, const std::optional<std::array<float, 3>>& imu) {
  const auto& g = model_->graph();
  const auto& scales = quant_->scales;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Layer& l = g.layer(i);
    auto out = buffer<std::int16_t>(i);
    const auto in = [&](std::size_t k = 0) { return std::span<const std::int16_t>(buffer<std::int16_t>(l.inputs[k])); };
    const auto in_shape = [&](std::size_t k = 0) { return g.layer(l.inputs[k]).output; };
    const auto in_scale = [&](std::size_t k = 0) { return scales[l.inputs[k]]; };
    switch (l.kind) {
      case LayerKind::Input:
        if (i == g.frame_input()) {
          const auto norm = core::normalize_frame(frame);
          for (std::size_t k = 0; k < norm.size(); ++k) out[k] = quantize_q15(norm[k], scales[i]);
        } else {
          for (std::size_t k = 0; k < 3; ++k) out[k] = quantize_q15((*imu)[k], scales[i]);
        }
        break;
      case LayerKind::Conv:
        conv2d_q15(in(), in_shape(), quant_->linear[i], geometry(l), out);
        counter_.value += geometry(l).macc(in_shape());
        break;
      case LayerKind::BatchNorm: {
        const auto src = in();
        if (model_->is_folded(i)) {
          if (src.data() != out.data()) std::copy(src.begin(), src.end(), out.begin());
          break;
        }
        const auto scale = model_->bn_scale(i), shift = model_->bn_shift(i);
        const std::size_t plane = l.output.h * l.output.w;
        for (std::size_t k = 0; k < out.size(); ++k) {
          const float x = dequantize(src[k], in_scale());
          out[k] = quantize_q15(x * scale[k / plane] + shift[k / plane], scales[i]);
        }
        break;
      }
      case LayerKind::Relu: {
        const auto src = in();
        if (src.data() != out.data()) std::copy(src.begin(), src.end(), out.begin());
        relu_q15_inplace(out);
        break;
      }
      case LayerKind::MaxPool: maxpool_q15(in(), in_shape(), l.pool, out); break;
      case LayerKind::Add: residual_add_q15(in(0), in_scale(0), in(1), in_scale(1), scales[i], out); break;
      case LayerKind::GlobalAvgPool: global_avg_pool_q15(in(), in_shape(), in_scale(), scales[i], out); break;
      case LayerKind::Concat: {
        std::size_t at = 0;
        for (std::size_t k = 0; k < l.inputs.size(); ++k) {
          const auto part = in(k);
          rescale_q15(part, in_scale(k), scales[i], out.subspan(at, part.size()));
          at += part.size();
        }
        break;
      }
      case LayerKind::FullyConnected:
        fully_connected_q15(in(), quant_->linear[i], l.out_channels, out);
        counter_.value += std::uint64_t{in().size()} * l.out_channels;
        break;
      case LayerKind::Softmax: {
        const auto src = in();
        std::vector<float> x(src.size());
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = dequantize(src[k], in_scale());
        softmax(x, x);
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = quantize_q15(x[k], scales[i]);
        break;
      }
    }
    notify(i);
    if (i == logits_layer(g)) {
      logits_.resize(out.size());
      for (std::size_t k = 0; k < out.size(); ++k) logits_[k] = dequantize(out[k], scales[i]);
    }
  }
}

InferenceResult InferenceContext::finish() {
  InferenceResult r;
  r.logits = logits_;
  const auto& g = model_->graph();
  if (!quant_ && g.layer(g.output()).kind == LayerKind::Softmax) {
    const auto p = buffer<float>(g.output());
    r.probs.assign(p.begin(), p.end());
  } else {
    r.probs.resize(r.logits.size());
    softmax(r.logits, r.probs);
  }
  r.top_k = rank_classes(r.probs, 3);
  return r;
}

InferenceResult infer(const Model& model, const core::TactileFrame& frame, std::optional<std::array<float, 3>> imu) {
  InferenceContext ctx(model);
  return ctx.run(frame, imu);
}

InferenceResult infer(const ModelGraph& graph, const WeightStore& weights, const core::TactileFrame& frame,
                      std::optional<std::array<float, 3>> imu) {
  return infer(Model(graph, weights), frame, imu);
}

}  // namespace smarthand::nn
