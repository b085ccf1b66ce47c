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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace smarthand::nn {

enum class DType : std::uint8_t { F32 = 0, Q15 = 1, U16 = 2 };

std::string to_string(DType dtype);

// (channels, height, width); vectors are (len, 1, 1).
struct Shape {
  std::size_t c = 0;
  std::size_t h = 1;
  std::size_t w = 1;

  std::size_t size() const { return c * h * w; }
  bool is_vector() const { return h == 1 && w == 1; }
  std::string str() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

struct Tensor {
  Shape shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(Shape s, float fill = 0.0f) : shape(s), data(s.size(), fill) {}
  Tensor(Shape s, std::vector<float> values);

  float& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * shape.h + y) * shape.w + x]; }
  float at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * shape.h + y) * shape.w + x]; }
  std::span<const float> span() const { return data; }
  std::span<float> span() { return data; }
};

// Q15 tensor: real value = code * scale / 32768, so codes cover [-scale, scale).
struct QTensor {
  Shape shape;
  std::vector<std::int16_t> data;
  float scale = 1.0f;
};

}  // namespace smarthand::nn
