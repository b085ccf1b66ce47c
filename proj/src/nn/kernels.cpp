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

#include "smarthand/nn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smarthand/error.hpp"

namespace smarthand::nn {
namespace {

// Below this many outputs the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelMinOutputs = 2048;

void check_conv(std::span<const float> in, const Shape& in_shape, std::span<const float> weights,
                std::span<const float> bias, const ConvGeometry& geom, std::span<const float> out) {
  const Shape o = geom.output_shape(in_shape);
  if (in.size() != in_shape.size()) throw Error(ErrorKind::ShapeMismatch, "conv input size does not match its shape");
  if (weights.size() != geom.out_channels * in_shape.c * geom.kernel * geom.kernel)
    throw Error(ErrorKind::ShapeMismatch, "conv weights do not match [out][in][k][k]");
  if (bias.size() != geom.out_channels) throw Error(ErrorKind::ShapeMismatch, "conv bias length != out channels");
  if (out.size() != o.size()) throw Error(ErrorKind::ShapeMismatch, "conv output buffer has the wrong size");
}

void check_fc(std::span<const float> in, std::span<const float> weights, std::span<const float> bias,
              std::size_t out_features, std::span<const float> out) {
  if (weights.size() != out_features * in.size()) throw Error(ErrorKind::ShapeMismatch, "fc weights do not match [out][in]");
  if (bias.size() != out_features || out.size() != out_features)
    throw Error(ErrorKind::ShapeMismatch, "fc bias/output length != out features");
}

// Accumulates one output channel. Loop order keeps the innermost loop over
// contiguous output columns so it vectorizes for stride 1.
void conv_channel(const float* in, const Shape& s, const float* w, float bias, const ConvGeometry& g, const Shape& o,
                  float* out) {
  std::fill(out, out + o.h * o.w, bias);
  const auto k = static_cast<std::ptrdiff_t>(g.kernel);
  const auto stride = static_cast<std::ptrdiff_t>(g.stride);
  const auto pad = static_cast<std::ptrdiff_t>(g.pad);
  const auto H = static_cast<std::ptrdiff_t>(s.h), W = static_cast<std::ptrdiff_t>(s.w);
  const auto OH = static_cast<std::ptrdiff_t>(o.h), OW = static_cast<std::ptrdiff_t>(o.w);
  for (std::size_t ic = 0; ic < s.c; ++ic) {
    const float* plane = in + ic * s.h * s.w;
    for (std::ptrdiff_t ky = 0; ky < k; ++ky) {
      for (std::ptrdiff_t kx = 0; kx < k; ++kx) {
        const float wv = w[(static_cast<std::ptrdiff_t>(ic) * k + ky) * k + kx];
        // Output columns whose input column ox*stride + kx - pad lies inside [0, W).
        const std::ptrdiff_t lo = kx >= pad ? 0 : (pad - kx + stride - 1) / stride;
        const std::ptrdiff_t hi = std::min(OW, (W - 1 + pad - kx) / stride + 1);
        if (lo >= hi) continue;
        for (std::ptrdiff_t oy = 0; oy < OH; ++oy) {
          const std::ptrdiff_t iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= H) continue;
          const float* row = plane + iy * W + kx - pad;
          float* dst = out + oy * OW;
          if (stride == 1) {
            for (std::ptrdiff_t ox = lo; ox < hi; ++ox) dst[ox] += wv * row[ox];
          } else {
            for (std::ptrdiff_t ox = lo; ox < hi; ++ox) dst[ox] += wv * row[ox * stride];
          }
        }
      }
    }
  }
}

}  // namespace

Shape ConvGeometry::output_shape(const Shape& in) const {
  if (kernel == 0 || stride == 0 || in.h + 2 * pad < kernel || in.w + 2 * pad < kernel)
    throw Error(ErrorKind::ShapeMismatch, "conv kernel does not fit input " + in.str());
  return {out_channels, (in.h + 2 * pad - kernel) / stride + 1, (in.w + 2 * pad - kernel) / stride + 1};
}

std::uint64_t ConvGeometry::macc(const Shape& in) const {
  const Shape o = output_shape(in);
  return std::uint64_t{o.h} * o.w * o.c * in.c * kernel * kernel;
}

namespace serial {

void conv2d(std::span<const float> in, const Shape& s, std::span<const float> weights, std::span<const float> bias,
            const ConvGeometry& g, std::span<float> out) {
  check_conv(in, s, weights, bias, g, out);
  const Shape o = g.output_shape(s);
  for (std::size_t oc = 0; oc < o.c; ++oc)
    for (std::size_t oy = 0; oy < o.h; ++oy)
      for (std::size_t ox = 0; ox < o.w; ++ox) {
        float acc = bias[oc];
        for (std::size_t ic = 0; ic < s.c; ++ic)
          for (std::size_t ky = 0; ky < g.kernel; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(s.h)) continue;
            for (std::size_t kx = 0; kx < g.kernel; ++kx) {
              const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(s.w)) continue;
              acc += weights[((oc * s.c + ic) * g.kernel + ky) * g.kernel + kx] *
                     in[(ic * s.h + static_cast<std::size_t>(iy)) * s.w + static_cast<std::size_t>(ix)];
            }
          }
        out[(oc * o.h + oy) * o.w + ox] = acc;
      }
}

void fully_connected(std::span<const float> in, std::span<const float> weights, std::span<const float> bias,
                     std::size_t out_features, std::span<float> out) {
  check_fc(in, weights, bias, out_features, out);
  for (std::size_t o = 0; o < out_features; ++o) {
    float acc = bias[o];
    for (std::size_t i = 0; i < in.size(); ++i) acc += weights[o * in.size() + i] * in[i];
    out[o] = acc;
  }
}

}  // namespace serial

void conv2d(std::span<const float> in, const Shape& s, std::span<const float> weights, std::span<const float> bias,
            const ConvGeometry& g, std::span<float> out) {
  check_conv(in, s, weights, bias, g, out);
  const Shape o = g.output_shape(s);
  const auto channels = static_cast<std::ptrdiff_t>(o.c);
  const std::size_t per_filter = s.c * g.kernel * g.kernel;
#pragma omp parallel for schedule(static) if (o.size() >= kParallelMinOutputs)
  for (std::ptrdiff_t oc = 0; oc < channels; ++oc) {
    const auto c = static_cast<std::size_t>(oc);
    conv_channel(in.data(), s, weights.data() + c * per_filter, bias[c], g, o, out.data() + c * o.h * o.w);
  }
}

void fully_connected(std::span<const float> in, std::span<const float> weights, std::span<const float> bias,
                     std::size_t out_features, std::span<float> out) {
  check_fc(in, weights, bias, out_features, out);
  const auto n = static_cast<std::ptrdiff_t>(out_features);
  const std::size_t width = in.size();
#pragma omp parallel for schedule(static) if (out_features * width >= 64 * kParallelMinOutputs)
  for (std::ptrdiff_t o = 0; o < n; ++o) {
    const float* row = weights.data() + static_cast<std::size_t>(o) * width;
    float acc = 0.0f;
    for (std::size_t i = 0; i < width; ++i) acc += row[i] * in[i];
    out[static_cast<std::size_t>(o)] = acc + bias[static_cast<std::size_t>(o)];
  }
}

void relu_inplace(std::span<float> x) {
  for (auto& v : x) v = v > 0.0f ? v : 0.0f;
}

void maxpool(std::span<const float> in, const Shape& s, std::size_t window, std::span<float> out) {
  const std::size_t oh = s.h / window, ow = s.w / window;
  if (in.size() != s.size() || out.size() != s.c * oh * ow) throw Error(ErrorKind::ShapeMismatch, "maxpool buffer sizes");
  for (std::size_t c = 0; c < s.c; ++c)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        float m = -std::numeric_limits<float>::infinity();
        for (std::size_t dy = 0; dy < window; ++dy)
          for (std::size_t dx = 0; dx < window; ++dx)
            m = std::max(m, in[(c * s.h + y * window + dy) * s.w + x * window + dx]);
        out[(c * oh + y) * ow + x] = m;
      }
}

void global_avg_pool(std::span<const float> in, const Shape& s, std::span<float> out) {
  if (in.size() != s.size() || out.size() != s.c) throw Error(ErrorKind::ShapeMismatch, "global pool buffer sizes");
  const std::size_t plane = s.h * s.w;
  for (std::size_t c = 0; c < s.c; ++c) {
    float sum = 0.0f;
    for (std::size_t i = 0; i < plane; ++i) sum += in[c * plane + i];
    out[c] = sum / static_cast<float>(plane);
  }
}

void residual_add(std::span<const float> a, std::span<const float> b, std::span<float> out) {
  if (a.size() != b.size() || out.size() != a.size()) throw Error(ErrorKind::ShapeMismatch, "residual operands differ in size");
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
}

void softmax(std::span<const float> in, std::span<float> out) {
  if (in.size() != out.size() || in.empty()) throw Error(ErrorKind::ShapeMismatch, "softmax buffer sizes");
  const float peak = *std::max_element(in.begin(), in.end());
  double total = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const float e = std::exp(in[i] - peak);
    out[i] = e;
    total += e;
  }
  for (auto& v : out) v = static_cast<float>(v / total);
}

void channel_affine_inplace(std::span<float> x, const Shape& s, std::span<const float> scale,
                            std::span<const float> shift) {
  if (x.size() != s.size() || scale.size() != s.c || shift.size() != s.c)
    throw Error(ErrorKind::ShapeMismatch, "batchnorm channel count mismatch");
  const std::size_t plane = s.h * s.w;
  for (std::size_t c = 0; c < s.c; ++c)
    for (std::size_t i = 0; i < plane; ++i) x[c * plane + i] = x[c * plane + i] * scale[c] + shift[c];
}

Tensor conv2d(const Tensor& in, std::span<const float> weights, std::span<const float> bias, const ConvGeometry& geom,
              MaccCounter* counter) {
  Tensor out(geom.output_shape(in.shape));
  conv2d(in.data, in.shape, weights, bias, geom, out.data);
  if (counter) counter->value += geom.macc(in.shape);
  return out;
}

Tensor fully_connected(const Tensor& in, std::span<const float> weights, std::span<const float> bias,
                       std::size_t out_features, MaccCounter* counter) {
  if (!in.shape.is_vector()) throw Error(ErrorKind::ShapeMismatch, "fully connected input must be a vector");
  Tensor out(Shape{out_features, 1, 1});
  fully_connected(in.data, weights, bias, out_features, out.data);
  if (counter) counter->value += std::uint64_t{out_features} * in.data.size();
  return out;
}

Tensor relu(Tensor x) {
  relu_inplace(x.data);
  return x;
}

Tensor maxpool2(const Tensor& in) {
  if (in.shape.h < 2 || in.shape.w < 2) throw Error(ErrorKind::ShapeMismatch, "maxpool2 needs at least 2x2 input");
  Tensor out(Shape{in.shape.c, in.shape.h / 2, in.shape.w / 2});
  maxpool(in.data, in.shape, 2, out.data);
  return out;
}

Tensor global_avg_pool(const Tensor& in) {
  Tensor out(Shape{in.shape.c, 1, 1});
  global_avg_pool(in.data, in.shape, out.data);
  return out;
}

Tensor residual_add(const Tensor& a, const Tensor& b) {
  if (!(a.shape == b.shape)) throw Error(ErrorKind::ShapeMismatch, "residual operands " + a.shape.str() + " vs " + b.shape.str());
  Tensor out(a.shape);
  residual_add(a.data, b.data, out.data);
  return out;
}

Tensor softmax(const Tensor& logits) {
  Tensor out(logits.shape);
  softmax(logits.data, out.data);
  return out;
}

Tensor concat(std::span<const Tensor> parts) {
  Tensor out(Shape{0, 1, 1});
  for (const auto& p : parts) {
    if (!p.shape.is_vector()) throw Error(ErrorKind::ShapeMismatch, "concat joins vectors only");
    out.data.insert(out.data.end(), p.data.begin(), p.data.end());
  }
  out.shape.c = out.data.size();
  return out;
}

namespace {

// Per-channel scale and shift in double; callers round once at the end.
void affine_wide(const BatchNormParams& bn, std::vector<double>& scale, std::vector<double>& shift) {
  const std::size_t n = bn.gamma.size();
  if (bn.beta.size() != n || bn.mean.size() != n || bn.var.size() != n)
    throw Error(ErrorKind::ShapeMismatch, "batchnorm parameter lengths differ");
  scale.resize(n);
  shift.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    if (!(bn.var[c] > 0.0f)) throw Error(ErrorKind::NonPositiveVariance, "running variance must be > 0");
    scale[c] = double{bn.gamma[c]} / std::sqrt(double{bn.var[c]} + double{bn.eps});
    shift[c] = double{bn.beta[c]} - double{bn.mean[c]} * scale[c];
  }
}

}  // namespace

void batchnorm_affine(const BatchNormParams& bn, std::vector<float>& scale, std::vector<float>& shift) {
  std::vector<double> s, t;
  affine_wide(bn, s, t);
  scale.assign(s.begin(), s.end());
  shift.assign(t.begin(), t.end());
}

FoldedConv batchnorm_fold(const BatchNormParams& bn, std::span<const float> conv_weights,
                          std::span<const float> conv_bias) {
  const std::size_t out_ch = conv_bias.size();
  if (bn.gamma.size() != out_ch || out_ch == 0 || conv_weights.size() % out_ch != 0)
    throw Error(ErrorKind::ShapeMismatch, "batchnorm channels do not match conv output channels");
  std::vector<double> scale, shift;
  affine_wide(bn, scale, shift);
  FoldedConv f;
  f.weights.resize(conv_weights.size());
  f.bias.resize(out_ch);
  const std::size_t per = conv_weights.size() / out_ch;
  for (std::size_t c = 0; c < out_ch; ++c) {
    for (std::size_t i = 0; i < per; ++i)
      f.weights[c * per + i] = static_cast<float>(double{conv_weights[c * per + i]} * scale[c]);
    f.bias[c] = static_cast<float>(double{conv_bias[c]} * scale[c] + shift[c]);
  }
  return f;
}

std::vector<float> mlp_forward(std::span<const float> imu_features, const MlpWeights& w, MaccCounter* counter) {
  constexpr std::size_t kIn = 3, kHidden = 30, kOut = 3;
  if (imu_features.size() != kIn || w.w1.size() != kHidden * kIn || w.b1.size() != kHidden ||
      w.w2.size() != kOut * kHidden || w.b2.size() != kOut)
    throw Error(ErrorKind::ShapeMismatch, "MLP expects 3 -> 30 -> 3 weights");
  std::vector<float> hidden(kHidden), out(kOut);
  fully_connected(imu_features, w.w1, w.b1, kHidden, hidden);
  relu_inplace(hidden);
  fully_connected(hidden, w.w2, w.b2, kOut, out);
  if (counter) counter->value += kIn * kHidden + kHidden * kOut;
  return out;
}

}  // namespace smarthand::nn
