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

#include "smarthand/nn/q15.hpp"

#include <algorithm>
#include <cmath>

#include "smarthand/error.hpp"

namespace smarthand::nn {
namespace {

__extension__ typedef __int128 i128;

void check_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::ScaleOverflow, "Q15 scale must be positive and finite");
}

std::int16_t clamp16(std::int64_t v) {
  return static_cast<std::int16_t>(std::clamp<std::int64_t>(v, INT16_MIN, INT16_MAX));
}

std::int64_t round_half_away(double v) { return static_cast<std::int64_t>(std::llround(v)); }

void conv_channel_q15(const std::int16_t* in, const Shape& s, const QuantizedLinear& layer, const ConvGeometry& g,
                      const Shape& o, std::size_t oc, std::int16_t* out) {
  const std::size_t per_filter = s.c * g.kernel * g.kernel;
  const std::int16_t* w = layer.weights.data() + oc * per_filter;
  for (std::size_t oy = 0; oy < o.h; ++oy)
    for (std::size_t ox = 0; ox < o.w; ++ox) {
      std::int64_t acc = layer.bias[oc];
      for (std::size_t ic = 0; ic < s.c; ++ic)
        for (std::size_t ky = 0; ky < g.kernel; ++ky) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(s.h)) continue;
          const std::int16_t* row = in + (ic * s.h + static_cast<std::size_t>(iy)) * s.w;
          const std::int16_t* wr = w + (ic * g.kernel + ky) * g.kernel;
          for (std::size_t kx = 0; kx < g.kernel; ++kx) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(s.w)) continue;
            acc += std::int32_t{row[ix]} * std::int32_t{wr[kx]};
          }
        }
      out[oy * o.w + ox] = layer.requant.apply(acc);
    }
}

void check_conv_q15(std::span<const std::int16_t> in, const Shape& s, const QuantizedLinear& layer,
                    const ConvGeometry& g, std::span<std::int16_t> out) {
  if (in.size() != s.size() || layer.weights.size() != g.out_channels * s.c * g.kernel * g.kernel ||
      layer.bias.size() != g.out_channels || out.size() != g.output_shape(s).size())
    throw Error(ErrorKind::ShapeMismatch, "q15 conv operand sizes");
}

void check_fc_q15(std::span<const std::int16_t> in, const QuantizedLinear& layer, std::size_t out_features,
                  std::span<std::int16_t> out) {
  if (layer.weights.size() != out_features * in.size() || layer.bias.size() != out_features || out.size() != out_features)
    throw Error(ErrorKind::ShapeMismatch, "q15 fc operand sizes");
}

std::int16_t fc_row(std::span<const std::int16_t> in, const QuantizedLinear& layer, std::size_t o) {
  std::int64_t acc = layer.bias[o];
  const std::int16_t* w = layer.weights.data() + o * in.size();
  for (std::size_t i = 0; i < in.size(); ++i) acc += std::int32_t{in[i]} * std::int32_t{w[i]};
  return layer.requant.apply(acc);
}

}  // namespace

std::int16_t saturate_q15(double code) {
  if (std::isnan(code)) throw Error(ErrorKind::ScaleOverflow, "NaN cannot be quantized");
  const double r = std::round(code);
  if (r >= INT16_MAX) return INT16_MAX;
  if (r <= INT16_MIN) return INT16_MIN;
  return static_cast<std::int16_t>(r);
}

std::int16_t quantize_q15(float x, float scale) {
  check_scale(scale);
  return saturate_q15(double{x} / double{scale} * kQ15One);
}

QTensor quantize_q15(const Tensor& t, float scale) {
  check_scale(scale);
  QTensor q{t.shape, std::vector<std::int16_t>(t.data.size()), scale};
  for (std::size_t i = 0; i < t.data.size(); ++i) q.data[i] = quantize_q15(t.data[i], scale);
  return q;
}

Tensor dequantize(const QTensor& q) {
  Tensor t(q.shape);
  for (std::size_t i = 0; i < q.data.size(); ++i) t.data[i] = dequantize(q.data[i], q.scale);
  return t;
}

float power_of_two_scale(std::span<const float> values) {
  float peak = 0.0f;
  for (float v : values) peak = std::max(peak, std::fabs(v));
  if (!std::isfinite(peak)) throw Error(ErrorKind::ScaleOverflow, "non-finite activation");
  return std::ldexp(1.0f, std::max(-20, static_cast<int>(std::ceil(std::log2(std::max(peak, 1e-30f))))));
}

Requantizer Requantizer::from_real(double real) {
  check_scale(real);
  int exp = 0;
  const double frac = std::frexp(real, &exp);  // real = frac * 2^exp, frac in [0.5, 1)
  auto m = static_cast<std::int64_t>(std::llround(frac * (1LL << 31)));
  if (m == (1LL << 31)) {
    m >>= 1;
    ++exp;
  }
  Requantizer r;
  r.multiplier = static_cast<std::int32_t>(m);
  r.shift = 31 - exp;
  return r;
}

std::int64_t Requantizer::apply_wide(std::int64_t acc) const {
  const i128 prod = static_cast<i128>(acc) * multiplier;
  if (shift <= 0) {
    const i128 v = prod << (-shift);
    return static_cast<std::int64_t>(std::clamp<i128>(v, INT64_MIN, INT64_MAX));
  }
  const i128 half = static_cast<i128>(1) << (shift - 1);
  const i128 mag = prod < 0 ? -prod : prod;
  const i128 q = (mag + half) >> shift;
  const i128 v = prod < 0 ? -q : q;
  return static_cast<std::int64_t>(std::clamp<i128>(v, INT64_MIN, INT64_MAX));
}

std::int16_t Requantizer::apply(std::int64_t acc) const { return clamp16(apply_wide(acc)); }

QuantizedLinear quantize_linear(std::span<const float> weights, std::span<const float> bias, float in_scale,
                                float out_scale) {
  check_scale(in_scale);
  check_scale(out_scale);
  QuantizedLinear q;
  q.weight_scale = power_of_two_scale(weights);
  q.in_scale = in_scale;
  q.out_scale = out_scale;
  q.weights.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) q.weights[i] = quantize_q15(weights[i], q.weight_scale);
  // One accumulator unit is in_scale * weight_scale / 2^30 in real terms.
  const double unit = double{in_scale} * q.weight_scale / (double{kQ15One} * kQ15One);
  q.bias.resize(bias.size());
  for (std::size_t i = 0; i < bias.size(); ++i) {
    const double b = double{bias[i]} / unit;
    if (!std::isfinite(b) || std::fabs(b) > 9.0e18) throw Error(ErrorKind::ScaleOverflow, "bias does not fit the accumulator");
    q.bias[i] = round_half_away(b);
  }
  q.requant = Requantizer::from_real(unit * kQ15One / out_scale);
  return q;
}

namespace serial {

void conv2d_q15(std::span<const std::int16_t> in, const Shape& s, const QuantizedLinear& layer, const ConvGeometry& g,
                std::span<std::int16_t> out) {
  check_conv_q15(in, s, layer, g, out);
  const Shape o = g.output_shape(s);
  for (std::size_t oc = 0; oc < o.c; ++oc) conv_channel_q15(in.data(), s, layer, g, o, oc, out.data() + oc * o.h * o.w);
}

void fully_connected_q15(std::span<const std::int16_t> in, const QuantizedLinear& layer, std::size_t out_features,
                         std::span<std::int16_t> out) {
  check_fc_q15(in, layer, out_features, out);
  for (std::size_t o = 0; o < out_features; ++o) out[o] = fc_row(in, layer, o);
}

}  // namespace serial

void conv2d_q15(std::span<const std::int16_t> in, const Shape& s, const QuantizedLinear& layer, const ConvGeometry& g,
                std::span<std::int16_t> out) {
  check_conv_q15(in, s, layer, g, out);
  const Shape o = g.output_shape(s);
  const auto channels = static_cast<std::ptrdiff_t>(o.c);
#pragma omp parallel for schedule(static) if (o.size() >= 2048)
  for (std::ptrdiff_t oc = 0; oc < channels; ++oc) {
    const auto c = static_cast<std::size_t>(oc);
    conv_channel_q15(in.data(), s, layer, g, o, c, out.data() + c * o.h * o.w);
  }
}

void fully_connected_q15(std::span<const std::int16_t> in, const QuantizedLinear& layer, std::size_t out_features,
                         std::span<std::int16_t> out) {
  serial::fully_connected_q15(in, layer, out_features, out);
}

QTensor conv2d_q15(const QTensor& in, std::span<const float> weights, std::span<const float> bias,
                   const ConvGeometry& geom, float out_scale, MaccCounter* counter) {
  const auto layer = quantize_linear(weights, bias, in.scale, out_scale);
  const Shape o = geom.output_shape(in.shape);
  QTensor out{o, std::vector<std::int16_t>(o.size()), out_scale};
  conv2d_q15(in.data, in.shape, layer, geom, out.data);
  if (counter) counter->value += geom.macc(in.shape);
  return out;
}

QTensor fully_connected_q15(const QTensor& in, std::span<const float> weights, std::span<const float> bias,
                            std::size_t out_features, float out_scale, MaccCounter* counter) {
  const auto layer = quantize_linear(weights, bias, in.scale, out_scale);
  QTensor out{Shape{out_features, 1, 1}, std::vector<std::int16_t>(out_features), out_scale};
  fully_connected_q15(in.data, layer, out_features, out.data);
  if (counter) counter->value += std::uint64_t{out_features} * in.data.size();
  return out;
}

void relu_q15_inplace(std::span<std::int16_t> x) {
  for (auto& v : x) v = v > 0 ? v : std::int16_t{0};
}

void maxpool_q15(std::span<const std::int16_t> in, const Shape& s, std::size_t window, std::span<std::int16_t> out) {
  const std::size_t oh = s.h / window, ow = s.w / window;
  if (in.size() != s.size() || out.size() != s.c * oh * ow) throw Error(ErrorKind::ShapeMismatch, "q15 maxpool sizes");
  for (std::size_t c = 0; c < s.c; ++c)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        std::int16_t m = INT16_MIN;
        for (std::size_t dy = 0; dy < window; ++dy)
          for (std::size_t dx = 0; dx < window; ++dx)
            m = std::max(m, in[(c * s.h + y * window + dy) * s.w + x * window + dx]);
        out[(c * oh + y) * ow + x] = m;
      }
}

void rescale_q15(std::span<const std::int16_t> in, float in_scale, float out_scale, std::span<std::int16_t> out) {
  if (in.size() != out.size()) throw Error(ErrorKind::ShapeMismatch, "q15 rescale sizes");
  const auto rq = Requantizer::from_real(double{in_scale} / out_scale);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = rq.apply(in[i]);
}

void residual_add_q15(std::span<const std::int16_t> a, float a_scale, std::span<const std::int16_t> b, float b_scale,
                      float out_scale, std::span<std::int16_t> out) {
  if (a.size() != b.size() || out.size() != a.size()) throw Error(ErrorKind::ShapeMismatch, "q15 residual sizes");
  // Align both operands to the finer scale in a wide accumulator, then requantize once.
  const float fine = std::min(a_scale, b_scale);
  const auto ra = Requantizer::from_real(double{a_scale} / fine * 65536.0);
  const auto rb = Requantizer::from_real(double{b_scale} / fine * 65536.0);
  const auto ro = Requantizer::from_real(double{fine} / out_scale / 65536.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ro.apply(ra.apply_wide(a[i]) + rb.apply_wide(b[i]));
}

void global_avg_pool_q15(std::span<const std::int16_t> in, const Shape& s, float in_scale, float out_scale,
                         std::span<std::int16_t> out) {
  if (in.size() != s.size() || out.size() != s.c) throw Error(ErrorKind::ShapeMismatch, "q15 global pool sizes");
  const std::size_t plane = s.h * s.w;
  const auto rq = Requantizer::from_real(double{in_scale} / out_scale / static_cast<double>(plane));
  for (std::size_t c = 0; c < s.c; ++c) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < plane; ++i) sum += in[c * plane + i];
    out[c] = rq.apply(sum);
  }
}

}  // namespace smarthand::nn
