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

#include "smarthand/device/device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smarthand/error.hpp"

namespace smarthand::device {

void TimerConfig::validate() const {
  for (double hz : {collect_hz, viz_hz, infer_hz, imu_hz})
    if (!(hz > 0.0) || !std::isfinite(hz)) throw Error(ErrorKind::OutOfRange, "timer rates must be positive");
}

std::uint64_t timer_deadline(std::uint64_t start_us, double hz, std::uint64_t k) {
  return start_us + static_cast<std::uint64_t>(std::llround(static_cast<double>(k) * 1e6 / hz));
}

SdramBuffer::SdramBuffer(std::size_t capacity) : capacity_(capacity) { frames_.reserve(capacity); }

void SdramBuffer::push(const core::TactileFrame& frame) {
  if (full()) throw Error(ErrorKind::OutOfRange, "SDRAM buffer full");
  frames_.push_back(frame);
}

ScanSource::ScanSource(readout::ResistorGrid grid, readout::AdcModel adc, readout::ScanMode mode, std::uint64_t seed,
                       int noise_lsb)
    : clean_(readout::scan(grid, adc, mode)), rng_(seed), noise_lsb_(std::max(0, noise_lsb)) {}

core::TactileFrame ScanSource::next_frame(std::uint64_t) {
  core::TactileFrame f = clean_;
  if (noise_lsb_ > 0) {
    const auto span = static_cast<std::uint64_t>(2 * noise_lsb_ + 1);
    for (auto& v : f.values) {
      const int n = static_cast<int>(rng_.below(span)) - noise_lsb_;
      v = static_cast<std::uint16_t>(std::clamp(int{v} + n, 0, int{core::kAdcMax}));
    }
  }
  return f;
}

core::ImuSample ScanSource::next_imu(std::uint64_t now_us) {
  core::ImuSample s;
  s.accel = {0, 0, 16384};  // 1 g on z at 16384 LSB/g
  for (auto& a : s.accel) a = static_cast<std::int16_t>(a + static_cast<int>(rng_.below(17)) - 8);
  for (auto& g : s.gyro) g = static_cast<std::int16_t>(static_cast<int>(rng_.below(9)) - 4);
  s.timestamp_us = now_us;
  return s;
}

ReplaySource::ReplaySource(core::Recording recording) : rec_(std::move(recording)) {}

core::TactileFrame ReplaySource::next_frame(std::uint64_t) {
  if (next_ >= rec_.frames.size())
    throw Error(ErrorKind::FrameSourceExhausted,
                "recording has only " + std::to_string(rec_.frames.size()) + " frames");
  return rec_.frames[next_++];
}

core::ImuSample ReplaySource::next_imu(std::uint64_t now_us) {
  core::ImuSample s;
  if (!rec_.imu.empty()) s = rec_.imu[std::min(next_imu_++, rec_.imu.size() - 1)];
  s.timestamp_us = now_us;
  return s;
}

DeviceState next_state(DeviceState state, std::uint8_t byte, Mode mode) {
  if (state == DeviceState::Idle && byte == kCmdStart) {
    switch (mode) {
      case Mode::Collect: return DeviceState::Collecting;
      case Mode::Visualize: return DeviceState::Visualizing;
      case Mode::Infer: return DeviceState::Inferring;
    }
  }
  if (state != DeviceState::Idle && byte == kCmdStop) return DeviceState::Idle;
  return state;
}

Device::Device(DeviceConfig config, FrameSource& source, Classifier classifier)
    : config_(config), source_(&source), classifier_(std::move(classifier)) {
  config_.timers.validate();
  if (config_.collect_target == 0) throw Error(ErrorKind::OutOfRange, "collect target must be at least one frame");
  config_.collect_target = std::min(config_.collect_target, kSdramFrames);
  if (config_.mode == Mode::Infer && !classifier_)
    throw Error(ErrorKind::Usage, "inference mode needs a classifier");
}

void Device::enter(DeviceState s, std::uint64_t t) {
  state_ = s;
  mode_start_ = t;
  frame_k_ = 0;
  imu_k_ = 0;
  history_.push_back({t, s});
}

core::TactileFrame Device::acquire(std::uint64_t t) {
  core::TactileFrame f = source_->next_frame(t);
  f.seq = frame_seq_++;
  f.timestamp_us = t;
  return f;
}

void Device::dump(std::vector<TimedPacket>& out, std::uint64_t t) {
  for (const auto& f : sdram_.frames()) out.push_back({t, make_frame_packet(f, PacketKind::Dump)});
  sdram_.clear();
}

std::vector<TimedPacket> Device::tick(std::uint64_t now_us) {
  if (now_us < now_) throw Error(ErrorKind::OutOfRange, "device time cannot go backwards");
  std::vector<TimedPacket> out;
  constexpr auto never = std::numeric_limits<std::uint64_t>::max();
  while (state_ != DeviceState::Idle) {
    const double hz = state_ == DeviceState::Collecting    ? config_.timers.collect_hz
                      : state_ == DeviceState::Visualizing ? config_.timers.viz_hz
                                                           : config_.timers.infer_hz;
    const std::uint64_t frame_due = timer_deadline(mode_start_, hz, frame_k_ + 1);
    const std::uint64_t imu_due =
        state_ == DeviceState::Collecting ? timer_deadline(mode_start_, config_.timers.imu_hz, imu_k_ + 1) : never;
    const std::uint64_t t = std::min(frame_due, imu_due);
    if (t > now_us) break;
    now_ = t;

    if (frame_due <= imu_due) {
      ++frame_k_;
      const auto frame = acquire(t);
      switch (state_) {
        case DeviceState::Collecting:
          sdram_.push(frame);
          if (sdram_.used() >= config_.collect_target) {
            dump(out, t);
            enter(DeviceState::Idle, t);
          }
          break;
        case DeviceState::Visualizing: out.push_back({t, make_frame_packet(frame)}); break;
        case DeviceState::Inferring: {
          out.push_back({t, make_frame_packet(frame)});
          const auto imu = source_->next_imu(t);
          out.push_back({t, {PacketKind::Inference, frame.seq, classifier_(frame, imu)}});
          break;
        }
        case DeviceState::Idle: break;
      }
    } else {
      ++imu_k_;
      const auto s = source_->next_imu(t);
      out.push_back({t, {PacketKind::Imu, imu_seq_++, ImuPayload{t, s.accel, s.gyro}}});
    }
  }
  now_ = now_us;
  return out;
}

std::vector<TimedPacket> Device::handle_command(std::uint8_t byte, std::uint64_t now_us) {
  auto out = tick(now_us);
  const DeviceState next = next_state(state_, byte, config_.mode);
  if (next == state_) return out;
  out.push_back({now_us, {PacketKind::Ack, ack_seq_++, AckPayload{byte, next}}});
  if (state_ == DeviceState::Collecting) dump(out, now_us);
  if (next == DeviceState::Collecting) sdram_.clear();
  enter(next, now_us);
  return out;
}

std::size_t Transcript::count(PacketKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(packets.begin(), packets.end(), [&](const TimedPacket& p) { return p.packet.kind == kind; }));
}

Bytes Transcript::wire() const {
  Bytes out;
  for (const auto& p : packets) append_packet(out, p.packet);
  return out;
}

std::vector<TimedCommand> parse_script(std::string_view text) {
  std::vector<TimedCommand> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string when, what, extra;
    if (!(ls >> when)) continue;
    const auto bad = [&](const std::string& msg) {
      return Error(ErrorKind::FileFormat, "script line " + std::to_string(lineno) + ": " + msg);
    };
    if (!(ls >> what) || (ls >> extra)) throw bad("expected '<time_ms> <command>'");
    double ms = 0;
    try {
      std::size_t used = 0;
      ms = std::stod(when, &used);
      if (used != when.size()) throw std::invalid_argument(when);
    } catch (const std::exception&) {
      throw bad("bad time '" + when + "'");
    }
    if (!(ms >= 0) || !std::isfinite(ms)) throw bad("time must be non-negative");
    std::uint8_t byte = 0;
    if (what.size() == 1) {
      byte = static_cast<std::uint8_t>(what[0]);
    } else if (what.size() == 4 && (what.rfind("0x", 0) == 0 || what.rfind("0X", 0) == 0)) {
      try {
        byte = static_cast<std::uint8_t>(std::stoul(what.substr(2), nullptr, 16));
      } catch (const std::exception&) {
        throw bad("bad byte '" + what + "'");
      }
    } else {
      throw bad("command must be one character or 0xNN");
    }
    const auto t = static_cast<std::uint64_t>(std::llround(ms * 1000.0));
    if (!out.empty() && t < out.back().t_us) throw Error(ErrorKind::OutOfRange, "script times must not decrease");
    out.push_back({t, byte});
  }
  return out;
}

Transcript run_session(const DeviceConfig& config, FrameSource& source, const Classifier& classifier,
                       std::span<const TimedCommand> script, std::uint64_t duration_us) {
  for (std::size_t i = 1; i < script.size(); ++i)
    if (script[i].t_us < script[i - 1].t_us) throw Error(ErrorKind::OutOfRange, "script times must not decrease");
  Device dev(config, source, classifier);
  Transcript tr;
  const auto record = [&](std::vector<TimedPacket> packets) {
    tr.packets.insert(tr.packets.end(), std::make_move_iterator(packets.begin()), std::make_move_iterator(packets.end()));
  };
  for (const auto& cmd : script) {
    if (cmd.t_us > duration_us) break;
    record(dev.handle_command(cmd.byte, cmd.t_us));
  }
  record(dev.tick(duration_us));
  tr.states = dev.history();
  tr.final_state = dev.state();
  return tr;
}

}  // namespace smarthand::device
