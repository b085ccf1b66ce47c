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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "smarthand/binary_io.hpp"
#include "smarthand/core/frame.hpp"

namespace smarthand::device {

inline constexpr std::uint8_t kSync0 = 0xAA;
inline constexpr std::uint8_t kSync1 = 0x55;
inline constexpr std::uint8_t kCmdStart = 'r';
inline constexpr std::uint8_t kCmdStop = 'p';

enum class PacketKind : std::uint8_t { Frame = 0, Imu = 1, Inference = 2, Ack = 3, Dump = 4 };

std::string_view to_string(PacketKind kind);

enum class DeviceState : std::uint8_t { Idle = 0, Collecting = 1, Visualizing = 2, Inferring = 3 };

std::string_view to_string(DeviceState state);

// Frame and Dump packets.
struct FramePayload {
  std::uint64_t timestamp_us = 0;
  core::Grid<std::uint16_t> values{};
  friend bool operator==(const FramePayload&, const FramePayload&) = default;
};

struct ImuPayload {
  std::uint64_t timestamp_us = 0;
  std::array<std::int16_t, 3> accel{};
  std::array<std::int16_t, 3> gyro{};
  friend bool operator==(const ImuPayload&, const ImuPayload&) = default;
};

struct InferencePayload {
  std::uint8_t class_id = 0;
  std::array<std::uint8_t, 3> top3{};
  std::array<float, 3> probs{};
  friend bool operator==(const InferencePayload&, const InferencePayload&) = default;
};

struct AckPayload {
  std::uint8_t command = 0;
  DeviceState state = DeviceState::Idle;
  friend bool operator==(const AckPayload&, const AckPayload&) = default;
};

struct DevicePacket {
  PacketKind kind = PacketKind::Frame;
  std::uint32_t seq = 0;
  std::variant<FramePayload, ImuPayload, InferencePayload, AckPayload> payload;

  friend bool operator==(const DevicePacket&, const DevicePacket&) = default;
};

// Payload bytes for each kind; nullopt for unknown kinds.
std::optional<std::size_t> payload_size(std::uint8_t kind);
// sync(2) + kind(1) + seq(4) + payload + crc(2)
std::size_t packet_size(PacketKind kind);

DevicePacket make_frame_packet(const core::TactileFrame& frame, PacketKind kind = PacketKind::Frame);
core::TactileFrame frame_of(const DevicePacket& packet);

// Throws ShapeMismatch if the payload alternative does not fit the kind.
Bytes encode_packet(const DevicePacket& packet);
void append_packet(Bytes& out, const DevicePacket& packet);

enum class DecodeStatus { Ok, CrcMismatch, Truncated };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Truncated;
  std::optional<DevicePacket> packet;
  std::size_t consumed = 0;  // bytes the caller may drop
  std::size_t skipped = 0;   // garbage bytes before the sync marker
};

// Decodes the first packet at or after the start of `stream`.
//   Ok:          consumed covers garbage + packet.
//   CrcMismatch: bad checksum or unknown kind; consumed = skipped + 1 so the
//                next call resumes the sync search one byte later.
//   Truncated:   need more bytes; consumed covers only garbage that can never
//                start a packet.
DecodeResult decode_packet(std::span<const std::uint8_t> stream);

// Incremental decoder over arbitrarily chunked input.
class StreamDecoder {
 public:
  std::vector<DevicePacket> feed(std::span<const std::uint8_t> chunk);

  std::size_t crc_errors() const { return crc_errors_; }
  std::size_t skipped_bytes() const { return skipped_bytes_; }
  std::size_t pending() const { return buffer_.size(); }

 private:
  Bytes buffer_;
  std::size_t crc_errors_ = 0;
  std::size_t skipped_bytes_ = 0;
};

}  // namespace smarthand::device
