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
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smarthand/binary_io.hpp"
#include "smarthand/nn/tensor.hpp"

namespace smarthand::nn {

// One named, typed n-d array in the shared record framing of SHW1 weight
// files and SHGA golden files.
struct Record {
  using Data = std::variant<std::vector<float>, std::vector<std::int16_t>, std::vector<std::uint16_t>>;

  std::string name;
  std::vector<std::uint32_t> dims;
  Data data;

  DType dtype() const { return static_cast<DType>(data.index()); }
  std::size_t count() const;
  std::size_t byte_size() const;
  const std::vector<float>& f32() const;

  friend bool operator==(const Record& a, const Record& b);
};

// magic(4) | version u16 | count u32 | records | CRC-32
// record: name_len u16 | name | dtype u8 | ndim u8 | dims u32 x ndim | data (LE)
Bytes encode_records(std::string_view magic, const std::vector<Record>& records);
std::vector<Record> decode_records(std::string_view magic, std::span<const std::uint8_t> bytes);

}  // namespace smarthand::nn
