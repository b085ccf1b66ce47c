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

#include "smarthand/core/files.hpp"

namespace smarthand::core {
namespace {

constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kRecordingHeaderBytes = 20;
constexpr std::size_t kFrameBytes = 4 + 8 + 2 * kTaxels;
constexpr std::size_t kImuBytes = 8 + 6 * 2;
constexpr std::size_t kCalibrationBodyBytes = 4 + 2 + 4 + 2 * kTaxels;
constexpr std::size_t kMaskBodyBytes = 4 + kTaxels;

void expect_version(ByteReader& r) {
  const auto v = r.u16();
  if (v != kVersion) throw Error(ErrorKind::FileFormat, "unsupported version " + std::to_string(v));
}

}  // namespace

Bytes encode_recording(const Recording& rec) {
  validate(rec);
  ByteWriter w;
  w.str("SHRC");
  w.u16(kVersion);
  w.u8(kRows);
  w.u8(kCols);
  w.u8(rec.label_id);
  w.u8(rec.session_id);
  w.u16(rec.rate_hz);
  w.u32(static_cast<std::uint32_t>(rec.frames.size()));
  w.u32(static_cast<std::uint32_t>(rec.imu.size()));
  for (const auto& f : rec.frames) {
    w.u32(f.seq);
    w.u64(f.timestamp_us);
    for (auto v : f.values) w.u16(v);
  }
  for (const auto& s : rec.imu) {
    w.u64(s.timestamp_us);
    for (auto a : s.accel) w.i16(a);
    for (auto g : s.gyro) w.i16(g);
  }
  w.seal();
  return std::move(w).take();
}

Recording decode_recording(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("SHRC");
  expect_version(r);
  const auto rows = r.u8();
  const auto cols = r.u8();
  Recording rec;
  rec.label_id = r.u8();
  rec.session_id = r.u8();
  rec.rate_hz = r.u16();
  const std::uint64_t frame_count = r.u32();
  const std::uint64_t imu_count = r.u32();
  verify_crc32_trailer(bytes, kRecordingHeaderBytes + frame_count * kFrameBytes + imu_count * kImuBytes);
  if (rows != kRows || cols != kCols) throw Error(ErrorKind::FileFormat, "grid must be 32x32");

  rec.frames.resize(frame_count);
  for (auto& f : rec.frames) {
    f.seq = r.u32();
    f.timestamp_us = r.u64();
    for (auto& v : f.values) v = r.u16();
  }
  rec.imu.resize(imu_count);
  for (auto& s : rec.imu) {
    s.timestamp_us = r.u64();
    for (auto& a : s.accel) a = r.i16();
    for (auto& g : s.gyro) g = r.i16();
  }
  validate(rec);
  return rec;
}

void save_recording(const Recording& rec, const std::filesystem::path& path) {
  write_file(path, encode_recording(rec));
}

Recording load_recording(const std::filesystem::path& path) { return decode_recording(read_file(path)); }

Bytes encode_calibration(const CalibrationMap& calib) {
  ByteWriter w;
  w.str("SHCA");
  w.u16(kVersion);
  w.u32(calib.source_frame_count);
  for (auto t : calib.thresholds) {
    if (t > kAdcMax) throw Error(ErrorKind::FileFormat, "threshold above 4095");
    w.u16(t);
  }
  w.seal();
  return std::move(w).take();
}

CalibrationMap decode_calibration(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("SHCA");
  expect_version(r);
  verify_crc32_trailer(bytes, kCalibrationBodyBytes);
  CalibrationMap calib;
  calib.source_frame_count = r.u32();
  for (auto& t : calib.thresholds) {
    t = r.u16();
    if (t > kAdcMax) throw Error(ErrorKind::FileFormat, "threshold above 4095");
  }
  return calib;
}

void save_calibration(const CalibrationMap& calib, const std::filesystem::path& path) {
  write_file(path, encode_calibration(calib));
}

CalibrationMap load_calibration(const std::filesystem::path& path) { return decode_calibration(read_file(path)); }

Bytes encode_hand_mask(const Grid<bool>& active) {
  ByteWriter w;
  w.str("SHMK");
  for (bool a : active) w.u8(a ? 1 : 0);
  w.seal();
  return std::move(w).take();
}

HandMask decode_hand_mask(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("SHMK");
  verify_crc32_trailer(bytes, kMaskBodyBytes);
  Grid<bool> active{};
  for (auto& a : active) {
    const auto b = r.u8();
    if (b > 1) throw Error(ErrorKind::FileFormat, "mask bytes must be 0 or 1");
    a = b == 1;
  }
  return HandMask::from_grid(active);
}

void save_hand_mask(const Grid<bool>& active, const std::filesystem::path& path) {
  write_file(path, encode_hand_mask(active));
}

HandMask load_hand_mask(const std::filesystem::path& path) { return decode_hand_mask(read_file(path)); }

}  // namespace smarthand::core
