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

#include "smarthand/nn/records.hpp"

#include <cstring>
#include <limits>

#include "smarthand/error.hpp"

namespace smarthand::nn {
namespace {

constexpr std::uint16_t kVersion = 1;

std::size_t element_bytes(std::uint8_t dtype) {
  switch (static_cast<DType>(dtype)) {
    case DType::F32: return 4;
    case DType::Q15:
    case DType::U16: return 2;
  }
  throw Error(ErrorKind::FileFormat, "unknown dtype " + std::to_string(dtype));
}

}  // namespace

std::size_t Record::count() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

std::size_t Record::byte_size() const { return count() * element_bytes(static_cast<std::uint8_t>(dtype())); }

const std::vector<float>& Record::f32() const {
  if (const auto* v = std::get_if<std::vector<float>>(&data)) return *v;
  throw Error(ErrorKind::WeightMismatch, "record '" + name + "' is not f32");
}

bool operator==(const Record& a, const Record& b) {
  if (a.name != b.name || a.dims != b.dims || a.data.index() != b.data.index()) return false;
  if (const auto* fa = std::get_if<std::vector<float>>(&a.data)) {
    const auto& fb = std::get<std::vector<float>>(b.data);
    return fa->size() == fb.size() && std::memcmp(fa->data(), fb.data(), fa->size() * sizeof(float)) == 0;
  }
  return a.data == b.data;
}

Bytes encode_records(std::string_view magic, const std::vector<Record>& records) {
  ByteWriter w;
  w.str(magic);
  w.u16(kVersion);
  w.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    if (r.name.size() > std::numeric_limits<std::uint16_t>::max() || r.dims.size() > 255)
      throw Error(ErrorKind::FileFormat, "record header too large");
    std::size_t expect = 1;
    for (auto d : r.dims) expect *= d;
    if (expect != r.count()) throw Error(ErrorKind::ShapeMismatch, "record '" + r.name + "' dims do not match data");
    w.u16(static_cast<std::uint16_t>(r.name.size()));
    w.str(r.name);
    w.u8(static_cast<std::uint8_t>(r.dtype()));
    w.u8(static_cast<std::uint8_t>(r.dims.size()));
    for (auto d : r.dims) w.u32(d);
    std::visit(
        [&](const auto& v) {
          using T = typename std::decay_t<decltype(v)>::value_type;
          for (T x : v) {
            if constexpr (std::is_same_v<T, float>) w.f32(x);
            else if constexpr (std::is_same_v<T, std::int16_t>) w.i16(x);
            else w.u16(x);
          }
        },
        r.data);
  }
  w.seal();
  return std::move(w).take();
}

std::vector<Record> decode_records(std::string_view magic, std::span<const std::uint8_t> bytes) {
  // Pass 1: walk the framing to find where the body ends.
  struct Extent {
    std::size_t header;
    std::size_t data;
  };
  ByteReader walk(bytes);
  walk.expect_magic(magic);
  const auto version = walk.u16();
  const std::uint32_t n = walk.u32();
  std::vector<Extent> extents;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t header = walk.position();
    walk.skip(walk.u16());
    const auto dtype = walk.u8();
    const auto ndim = walk.u8();
    std::uint64_t count = 1;
    for (std::uint8_t d = 0; d < ndim; ++d) {
      count *= walk.u32();
      if (count > bytes.size()) throw Error(ErrorKind::FileFormat, "record larger than file");
    }
    const std::size_t data = walk.position();
    walk.skip(static_cast<std::size_t>(count) * element_bytes(dtype));
    extents.push_back({header, data});
  }
  verify_crc32_trailer(bytes, walk.position());
  if (version != kVersion) throw Error(ErrorKind::FileFormat, "unsupported version " + std::to_string(version));

  // Pass 2: decode, now that the contents are known to be intact.
  std::vector<Record> records;
  records.reserve(n);
  for (const auto& ext : extents) {
    ByteReader r(bytes.subspan(ext.header));
    Record rec;
    const auto name = r.raw(r.u16());
    rec.name.assign(name.begin(), name.end());
    const auto dtype = static_cast<DType>(r.u8());
    const auto ndim = r.u8();
    std::size_t count = 1;
    for (std::uint8_t d = 0; d < ndim; ++d) {
      rec.dims.push_back(r.u32());
      count *= rec.dims.back();
    }
    switch (dtype) {
      case DType::F32: {
        std::vector<float> v(count);
        for (auto& x : v) x = r.f32();
        rec.data = std::move(v);
        break;
      }
      case DType::Q15: {
        std::vector<std::int16_t> v(count);
        for (auto& x : v) x = r.i16();
        rec.data = std::move(v);
        break;
      }
      case DType::U16: {
        std::vector<std::uint16_t> v(count);
        for (auto& x : v) x = r.u16();
        rec.data = std::move(v);
        break;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace smarthand::nn
