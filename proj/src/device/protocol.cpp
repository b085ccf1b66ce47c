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

#include "smarthand/device/protocol.hpp"

#include <algorithm>
#include <cstring>

#include "smarthand/error.hpp"

namespace smarthand::device {
namespace {

constexpr std::size_t kHeader = 2 + 1 + 4;
constexpr std::size_t kFramePayload = 8 + 2 * core::kTaxels;
constexpr std::size_t kImuPayload = 8 + 6 * 2;
constexpr std::size_t kInferencePayload = 1 + 3 + 3 * 4;
constexpr std::size_t kAckPayload = 2;

Error wrong_payload(PacketKind kind) {
  return Error(ErrorKind::ShapeMismatch, "payload does not match packet kind " + std::string(to_string(kind)));
}

DevicePacket parse_body(PacketKind kind, std::uint32_t seq, ByteReader& r) {
  DevicePacket p{kind, seq, {}};
  switch (kind) {
    case PacketKind::Frame:
    case PacketKind::Dump: {
      FramePayload f;
      f.timestamp_us = r.u64();
      for (auto& v : f.values) v = r.u16();
      p.payload = f;
      break;
    }
    case PacketKind::Imu: {
      ImuPayload m;
      m.timestamp_us = r.u64();
      for (auto& v : m.accel) v = r.i16();
      for (auto& v : m.gyro) v = r.i16();
      p.payload = m;
      break;
    }
    case PacketKind::Inference: {
      InferencePayload inf;
      inf.class_id = r.u8();
      for (auto& v : inf.top3) v = r.u8();
      for (auto& v : inf.probs) v = r.f32();
      p.payload = inf;
      break;
    }
    case PacketKind::Ack: {
      AckPayload a;
      a.command = r.u8();
      a.state = static_cast<DeviceState>(r.u8());
      p.payload = a;
      break;
    }
  }
  return p;
}

}  // namespace

std::string_view to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::Frame: return "Frame";
    case PacketKind::Imu: return "Imu";
    case PacketKind::Inference: return "Inference";
    case PacketKind::Ack: return "Ack";
    case PacketKind::Dump: return "Dump";
  }
  return "?";
}

std::string_view to_string(DeviceState state) {
  switch (state) {
    case DeviceState::Idle: return "Idle";
    case DeviceState::Collecting: return "Collecting";
    case DeviceState::Visualizing: return "Visualizing";
    case DeviceState::Inferring: return "Inferring";
  }
  return "?";
}

std::optional<std::size_t> payload_size(std::uint8_t kind) {
  switch (kind) {
    case 0:
    case 4: return kFramePayload;
    case 1: return kImuPayload;
    case 2: return kInferencePayload;
    case 3: return kAckPayload;
    default: return std::nullopt;
  }
}

std::size_t packet_size(PacketKind kind) { return kHeader + *payload_size(static_cast<std::uint8_t>(kind)) + 2; }

DevicePacket make_frame_packet(const core::TactileFrame& frame, PacketKind kind) {
  return {kind, frame.seq, FramePayload{frame.timestamp_us, frame.values}};
}

core::TactileFrame frame_of(const DevicePacket& packet) {
  const auto* f = std::get_if<FramePayload>(&packet.payload);
  if (!f) throw wrong_payload(packet.kind);
  core::TactileFrame out;
  out.values = f->values;
  out.seq = packet.seq;
  out.timestamp_us = f->timestamp_us;
  return out;
}

void append_packet(Bytes& out, const DevicePacket& p) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(p.kind));
  w.u32(p.seq);
  switch (p.kind) {
    case PacketKind::Frame:
    case PacketKind::Dump: {
      const auto* f = std::get_if<FramePayload>(&p.payload);
      if (!f) throw wrong_payload(p.kind);
      w.u64(f->timestamp_us);
      for (auto v : f->values) w.u16(v);
      break;
    }
    case PacketKind::Imu: {
      const auto* m = std::get_if<ImuPayload>(&p.payload);
      if (!m) throw wrong_payload(p.kind);
      w.u64(m->timestamp_us);
      for (auto v : m->accel) w.i16(v);
      for (auto v : m->gyro) w.i16(v);
      break;
    }
    case PacketKind::Inference: {
      const auto* inf = std::get_if<InferencePayload>(&p.payload);
      if (!inf) throw wrong_payload(p.kind);
      w.u8(inf->class_id);
      for (auto v : inf->top3) w.u8(v);
      for (auto v : inf->probs) w.f32(v);
      break;
    }
    case PacketKind::Ack: {
      const auto* a = std::get_if<AckPayload>(&p.payload);
      if (!a) throw wrong_payload(p.kind);
      w.u8(a->command);
      w.u8(static_cast<std::uint8_t>(a->state));
      break;
    }
    default: throw Error(ErrorKind::ShapeMismatch, "unknown packet kind");
  }
  const auto body = std::move(w).take();
  const std::uint16_t crc = crc16_ccitt(body);
  out.push_back(kSync0);
  out.push_back(kSync1);
  out.insert(out.end(), body.begin(), body.end());
  out.push_back(static_cast<std::uint8_t>(crc & 0xFF));
  out.push_back(static_cast<std::uint8_t>(crc >> 8));
}

Bytes encode_packet(const DevicePacket& packet) {
  Bytes out;
  append_packet(out, packet);
  return out;
}

DecodeResult decode_packet(std::span<const std::uint8_t> s) {
  DecodeResult r;
  std::size_t at = 0;
  while (at + 1 < s.size() && !(s[at] == kSync0 && s[at + 1] == kSync1)) ++at;
  if (at + 1 >= s.size()) {
    // A trailing 0xAA may be the first half of a marker.
    r.skipped = (!s.empty() && s.back() == kSync0) ? s.size() - 1 : s.size();
    r.consumed = r.skipped;
    return r;
  }
  r.skipped = at;
  r.consumed = at;
  if (at + kHeader > s.size()) return r;
  const auto size = payload_size(s[at + 2]);
  if (!size) {
    r.status = DecodeStatus::CrcMismatch;
    r.consumed = at + 1;
    return r;
  }
  const std::size_t body = 1 + 4 + *size;
  if (at + 2 + body + 2 > s.size()) return r;
  const auto body_bytes = s.subspan(at + 2, body);
  const std::uint16_t want = static_cast<std::uint16_t>(s[at + 2 + body] | (s[at + 3 + body] << 8));
  if (crc16_ccitt(body_bytes) != want) {
    r.status = DecodeStatus::CrcMismatch;
    r.consumed = at + 1;
    return r;
  }
  ByteReader reader(body_bytes);
  const auto kind = static_cast<PacketKind>(reader.u8());
  const auto seq = reader.u32();
  r.packet = parse_body(kind, seq, reader);
  r.status = DecodeStatus::Ok;
  r.consumed = at + 2 + body + 2;
  return r;
}

std::vector<DevicePacket> StreamDecoder::feed(std::span<const std::uint8_t> chunk) {
  buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
  std::vector<DevicePacket> out;
  std::size_t pos = 0;
  for (;;) {
    const auto r = decode_packet(std::span<const std::uint8_t>(buffer_).subspan(pos));
    skipped_bytes_ += r.status == DecodeStatus::Truncated ? r.consumed : r.skipped;
    pos += r.consumed;
    if (r.status == DecodeStatus::Truncated) break;
    if (r.status == DecodeStatus::CrcMismatch) {
      ++crc_errors_;
      ++skipped_bytes_;
      continue;
    }
    out.push_back(std::move(*r.packet));
  }
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
  return out;
}

}  // namespace smarthand::device
