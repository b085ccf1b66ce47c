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
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "smarthand/core/frame.hpp"
#include "smarthand/device/protocol.hpp"
#include "smarthand/readout/readout.hpp"
#include "smarthand/rng.hpp"

namespace smarthand::device {

inline constexpr std::size_t kSdramFrames = 4096;

struct TimerConfig {
  double collect_hz = 100.0;
  double viz_hz = 10.0;
  double infer_hz = 8.0;
  double imu_hz = 100.0;

  // Throws OutOfRange unless every rate is positive and finite.
  void validate() const;
};

// Time of the k-th event (k >= 1) of a timer started at `start_us`. Computed
// from k directly so non-integer periods never drift.
std::uint64_t timer_deadline(std::uint64_t start_us, double hz, std::uint64_t k);

class SdramBuffer {
 public:
  explicit SdramBuffer(std::size_t capacity = kSdramFrames);

  // Throws OutOfRange when full.
  void push(const core::TactileFrame& frame);
  void clear() { frames_.clear(); }
  std::size_t used() const { return frames_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return frames_.size() == capacity_; }
  const std::vector<core::TactileFrame>& frames() const { return frames_; }

 private:
  std::size_t capacity_;
  std::vector<core::TactileFrame> frames_;
};

// Where the firmware gets its data. Implementations set frame values; the
// device stamps seq and timestamp.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual core::TactileFrame next_frame(std::uint64_t now_us) = 0;
  virtual core::ImuSample next_imu(std::uint64_t now_us) = 0;
};

// Scans a fixed resistor grid every frame, plus seeded ADC noise of up to
// +-noise_lsb, and a gravity-only IMU with seeded jitter.
class ScanSource : public FrameSource {
 public:
  ScanSource(readout::ResistorGrid grid, readout::AdcModel adc, readout::ScanMode mode, std::uint64_t seed,
             int noise_lsb = 0);
  core::TactileFrame next_frame(std::uint64_t now_us) override;
  core::ImuSample next_imu(std::uint64_t now_us) override;

 private:
  core::TactileFrame clean_;
  Rng rng_;
  int noise_lsb_;
};

// Replays a recording in order. Throws FrameSourceExhausted after the last
// frame. IMU samples are replayed likewise, or zero if the recording has none.
class ReplaySource : public FrameSource {
 public:
  explicit ReplaySource(core::Recording recording);
  core::TactileFrame next_frame(std::uint64_t now_us) override;
  core::ImuSample next_imu(std::uint64_t now_us) override;

  std::size_t frames_left() const { return rec_.frames.size() - next_; }

 private:
  core::Recording rec_;
  std::size_t next_ = 0;
  std::size_t next_imu_ = 0;
};

// Classification of one frame as carried by Inference packets.
using Classifier = std::function<InferencePayload(const core::TactileFrame&, const core::ImuSample&)>;

enum class Mode : std::uint8_t { Collect, Visualize, Infer };

struct DeviceConfig {
  Mode mode = Mode::Collect;
  // Frames to collect before the automatic dump; values above 4096 are
  // clamped, 0 is rejected (OutOfRange).
  std::size_t collect_target = kSdramFrames;
  TimerConfig timers;
};

// Pure transition function: 'r' in Idle enters the configured mode, 'p' in any
// active mode returns to Idle, anything else is ignored.
DeviceState next_state(DeviceState state, std::uint8_t byte, Mode mode);

struct TimedPacket {
  std::uint64_t t_us = 0;
  DevicePacket packet;
};

struct StateChange {
  std::uint64_t t_us = 0;
  DeviceState state = DeviceState::Idle;
};

class Device {
 public:
  // Throws OutOfRange on bad timers; Usage if mode is Infer without a classifier.
  Device(DeviceConfig config, FrameSource& source, Classifier classifier = {});

  // Runs every timer event with deadline <= now_us, in time order. Time never
  // goes backwards (OutOfRange).
  std::vector<TimedPacket> tick(std::uint64_t now_us);
  // tick(now_us), then applies a command byte. Accepted commands answer with
  // an Ack; stopping a collection early dumps what was buffered.
  std::vector<TimedPacket> handle_command(std::uint8_t byte, std::uint64_t now_us);

  DeviceState state() const { return state_; }
  const SdramBuffer& buffer() const { return sdram_; }
  std::uint64_t now() const { return now_; }
  // Every state entered so far, starting with Idle at t = 0.
  const std::vector<StateChange>& history() const { return history_; }
  const DeviceConfig& config() const { return config_; }

 private:
  void enter(DeviceState s, std::uint64_t t);
  void dump(std::vector<TimedPacket>& out, std::uint64_t t);
  core::TactileFrame acquire(std::uint64_t t);

  DeviceConfig config_;
  FrameSource* source_;
  Classifier classifier_;
  DeviceState state_ = DeviceState::Idle;
  SdramBuffer sdram_;
  std::uint64_t now_ = 0;
  std::uint64_t mode_start_ = 0;
  std::uint64_t frame_k_ = 0;
  std::uint64_t imu_k_ = 0;
  std::uint32_t frame_seq_ = 0;
  std::uint32_t imu_seq_ = 0;
  std::uint32_t ack_seq_ = 0;
  std::vector<StateChange> history_{{0, DeviceState::Idle}};
};

struct TimedCommand {
  std::uint64_t t_us = 0;
  std::uint8_t byte = 0;
};

struct Transcript {
  std::vector<TimedPacket> packets;
  std::vector<StateChange> states;  // starts with Idle at t = 0
  DeviceState final_state = DeviceState::Idle;

  std::size_t count(PacketKind kind) const;
  Bytes wire() const;
};

// Parses "<time_ms> <char>" lines ('#' comments); the char may also be
// written as 0xNN. Throws FileFormat, or OutOfRange for decreasing times.
std::vector<TimedCommand> parse_script(std::string_view text);

// Drives a fresh device over [0, duration_us]. Commands must have
// non-decreasing times (OutOfRange otherwise); commands after the end are
// ignored. At equal timestamps timer events run before the command.
Transcript run_session(const DeviceConfig& config, FrameSource& source, const Classifier& classifier,
                       std::span<const TimedCommand> script, std::uint64_t duration_us);

}  // namespace smarthand::device
