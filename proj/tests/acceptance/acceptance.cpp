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

// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned below.
//
//   acceptance [--only id]... [--expect-fail id]...
//
// Each criterion is made of named checks (e.g. kernels.bn-fold). Exit status
// is 0 when the set of failing checks equals the --expect-fail set exactly, so
// a known failure stays visible without hiding new ones (or a known one that
// starts passing).

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "crc_oracle.hpp"
#include "nn_oracle.hpp"
#include "nodal_oracle.hpp"
#include "smarthand/device/device.hpp"
#include "smarthand/device/protocol.hpp"
#include "smarthand/nn/budget.hpp"
#include "smarthand/nn/engine.hpp"
#include "smarthand/nn/q15.hpp"
#include "smarthand/readout/scenario.hpp"
#include "smarthand/rng.hpp"

using namespace smarthand;
using namespace smarthand::nn;

namespace {

constexpr std::uint64_t kMaccTarget = 4'604'992;
constexpr double kMaccPaper = 4.7e6;
constexpr double kMaccRelTol = 0.021;
constexpr std::size_t kFlashBytes = 181'248;
constexpr std::size_t kArenaQ15Bytes = 65'536;
constexpr double kLatencyMs = 5.0;
constexpr int kLatencyRuns = 50;
constexpr int kGhostMinLsb = 100;
constexpr int kIsolatedMaxLsb = 1;
constexpr int kOracleLsb = 1;
constexpr std::size_t kRoundTrips = 10'000;
constexpr double kKernelTol = 1e-6;
constexpr double kQ15Tol = 2e-2;
constexpr int kKernelCases = 100;
constexpr double kGoldenTol = 1e-4;
constexpr double kQ15Agreement = 0.99;

const std::filesystem::path kData = SMARTHAND_DATA_DIR;
const std::filesystem::path kFixtures = SMARTHAND_FIXTURE_DIR;

// A criterion is a set of named checks; it passes when none of them fails.
struct Outcome {
  std::vector<std::string> failed;
  std::string detail;

  Outcome& need(bool ok, const char* part) {
    if (!ok) failed.emplace_back(part);
    return *this;
  }
  bool pass() const { return failed.empty(); }
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> check;
};

std::string grouped(std::uint64_t v) {
  std::string s = std::to_string(v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

template <typename... T>
std::string str(const T&... parts) {
  std::ostringstream s;
  s << std::setprecision(4);
  (s << ... << parts);
  return s.str();
}

std::vector<float> uniform_vec(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
  return v;
}

// ---------------------------------------------------------------- budgets

Outcome macc_budget() {
  const auto g = reference_graph();
  const auto engine = count_macc(g);
  const auto sheet = test::sheet_total(test::reference_macc_sheet());
  const auto walker = test::oracle_macc(g);
  const double below = (kMaccPaper - double(engine)) / kMaccPaper;
  const bool oracles_agree = engine == sheet && engine == walker;
  Outcome o;
  o.need(engine == kMaccTarget, "exact").need(oracles_agree, "oracles").need(std::abs(below) <= kMaccRelTol, "within-2.1%");
  o.detail = str("engine ", grouped(engine), ", closed-form sheet ", grouped(sheet), ", graph walker ", grouped(walker),
              "; required ", grouped(kMaccTarget), " (difference ", std::int64_t(engine) - std::int64_t(kMaccTarget),
              ", the FC layer's 544); ", std::setprecision(3), below * 100, "% below 4.7 M ",
              (std::abs(below) <= kMaccRelTol ? "(within 2.1%)" : "(outside 2.1%)"));
  return o;
}

Outcome flash_budget() {
  const auto g = reference_graph();
  const auto store = random_weights(g, 2024);
  const auto bytes = store.encode();
  const bool round_trip = WeightStore::decode(bytes) == store;
  Outcome o;
  o.need(bytes.size() <= kFlashBytes, "size").need(round_trip, "round-trip");
  o.detail = str("SHW1 file ", grouped(bytes.size()), " B <= ", grouped(kFlashBytes), " B; ", grouped(store.total_param_count()),
              " parameters; decode(encode) ", round_trip ? "identical" : "DIFFERS");
  return o;
}

Outcome arena_planner() {
  const auto g = reference_graph();
  const auto plan = plan_memory(g, DType::Q15);
  std::size_t conflicts = 0, out_of_bounds = 0, lower_bound = 0;
  for (std::size_t a = 0; a < plan.tensors.size(); ++a) {
    const auto& x = plan.tensors[a];
    if (x.offset + x.size > plan.peak_bytes || x.offset % kArenaAlignment) ++out_of_bounds;
    for (std::size_t b = a + 1; b < plan.tensors.size(); ++b) {
      const auto& y = plan.tensors[b];
      const bool live = x.first <= y.last && y.first <= x.last;
      const bool space = x.offset < y.offset + y.size && y.offset < x.offset + x.size;
      conflicts += live && space;
    }
  }
  for (std::size_t step = 0; step < g.size(); ++step) {
    std::size_t sum = 0;
    for (const auto& t : plan.tensors)
      if (t.first <= step && step <= t.last) sum += t.size;
    lower_bound = std::max(lower_bound, sum);
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (plan.tensors[plan.layer_tensor[i]].size < g.layer(i).output.size() * element_bytes(DType::Q15))
      ++out_of_bounds;
  Outcome o;
  o.need(plan.peak_bytes == kArenaQ15Bytes, "peak").need(conflicts == 0 && out_of_bounds == 0, "pairwise");
  o.detail = str("Q15 peak ", grouped(plan.peak_bytes), " B over ", plan.tensors.size(), " buffers; ", conflicts,
              " live/space overlaps, ", out_of_bounds, " bound violations; live-sum lower bound ", grouped(lower_bound),
              " B. The 52 kB embedded figure is not reproduced (vendor planner internals unknown).");
  return o;
}

Outcome latency() {
  omp_set_num_threads(1);
  const auto g = reference_graph();
  const Model model(g, random_weights(g, 5));
  InferenceContext ctx(model);
  Rng rng(6);
  core::TactileFrame frame;
  for (auto& v : frame.values) v = static_cast<std::uint16_t>(rng.below(core::kAdcMax + 1));
  ctx.run(frame);
  std::vector<double> ms;
  for (int i = 0; i < kLatencyRuns; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    ctx.run(frame);
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];
  const double macc_per_s = double(count_macc(g)) / (median / 1e3);
  Outcome o;
  o.need(median <= kLatencyMs, "5ms");
  o.detail = str("F32, 1 thread, median of ", kLatencyRuns, ": ", median, " ms (<= ", kLatencyMs, " ms); ", std::setprecision(4),
              macc_per_s / 1e6, " M MACC/s. Embedded context: 100 ms at 216 MHz is about 4.7 cycles per MACC.");
  return o;
}

// ---------------------------------------------------------------- readout

Outcome ghosting() {
  const auto sc = readout::load_scenario(kData / "ghost.scenario");
  const auto grid = sc.grid();
  constexpr std::size_t row = 5, col = 7;
  const int truth = readout::divider_code(sc.adc, grid.at(row, col));
  const int non = readout::scan(grid, sc.adc, readout::ScanMode::NonIsolated).at(row, col);
  const int iso = readout::scan(grid, sc.adc, readout::ScanMode::Isolated).at(row, col);
  const int non_oracle =
      readout::quantize(sc.adc, test::oracle_sense_voltage(grid, sc.adc, row, col, test::Electrodes::Floating));
  const int iso_oracle =
      readout::quantize(sc.adc, test::oracle_sense_voltage(grid, sc.adc, row, col, test::Electrodes::Isolated));
  const int ghost_non = std::abs(non - truth), ghost_iso = std::abs(iso - truth);
  const bool oracle_ok = std::abs(non - non_oracle) <= kOracleLsb && std::abs(iso - iso_oracle) <= kOracleLsb;
  Outcome o;
  o.need(ghost_non > kGhostMinLsb, "nonisolated").need(ghost_iso <= kIsolatedMaxLsb, "isolated").need(oracle_ok, "oracle");
  o.detail = str("fourth corner (5,7): untouched truth ", truth, " LSB; non-isolated ", non, " (ghost ", ghost_non,
              " > ", kGhostMinLsb, "), isolated ", iso, " (ghost ", ghost_iso, " <= ", kIsolatedMaxLsb,
              "); nodal oracle ", non_oracle, " / ", iso_oracle);
  return o;
}

// ---------------------------------------------------------------- protocol

device::DevicePacket random_packet(Rng& rng) {
  using namespace device;
  DevicePacket p;
  p.kind = static_cast<PacketKind>(rng.below(5));
  p.seq = static_cast<std::uint32_t>(rng.next());
  switch (p.kind) {
    case PacketKind::Frame:
    case PacketKind::Dump: {
      FramePayload f;
      f.timestamp_us = rng.next();
      for (auto& v : f.values) v = static_cast<std::uint16_t>(rng.below(core::kAdcMax + 1));
      p.payload = f;
      break;
    }
    case PacketKind::Imu: {
      ImuPayload m;
      m.timestamp_us = rng.next();
      for (auto& a : m.accel) a = static_cast<std::int16_t>(rng.next());
      for (auto& a : m.gyro) a = static_cast<std::int16_t>(rng.next());
      p.payload = m;
      break;
    }
    case PacketKind::Inference: {
      InferencePayload inf;
      inf.class_id = static_cast<std::uint8_t>(rng.below(17));
      for (auto& t : inf.top3) t = static_cast<std::uint8_t>(rng.below(17));
      for (auto& q : inf.probs) q = static_cast<float>(rng.uniform());
      p.payload = inf;
      break;
    }
    case PacketKind::Ack:
      p.payload = AckPayload{static_cast<std::uint8_t>(rng.next()), static_cast<DeviceState>(rng.below(4))};
      break;
  }
  return p;
}

Outcome protocol() {
  using namespace device;
  Rng rng(99);
  std::vector<DevicePacket> packets;
  Bytes stream;
  std::size_t round_trip_ok = 0;
  for (std::size_t i = 0; i < kRoundTrips; ++i) {
    packets.push_back(random_packet(rng));
    const auto bytes = encode_packet(packets.back());
    const auto r = decode_packet(bytes);
    round_trip_ok += r.status == DecodeStatus::Ok && r.packet && *r.packet == packets.back() && r.consumed == bytes.size();
    stream.insert(stream.end(), bytes.begin(), bytes.end());
  }

  // every single-bit flip of one Frame packet; the CRC covers kind..payload,
  // the sync marker is checked by framing
  DevicePacket frame = random_packet(rng);
  while (frame.kind != PacketKind::Frame) frame = random_packet(rng);
  const auto good = encode_packet(frame);
  std::size_t flips = 0, crc_misses = 0, accepted = 0, sync_flips = 0;
  for (std::size_t byte = 0; byte < good.size(); ++byte)
    for (int bit = 0; bit < 8; ++bit) {
      Bytes bad = good;
      bad[byte] ^= static_cast<std::uint8_t>(1u << bit);
      ++flips;
      StreamDecoder dec;
      accepted += !dec.feed(bad).empty();
      if (byte < 2) {
        ++sync_flips;
        continue;
      }
      const std::uint16_t stored = std::uint16_t(bad[bad.size() - 2] | (bad[bad.size() - 1] << 8));
      crc_misses += test::bitwise_crc16(std::span(bad).subspan(2, bad.size() - 4)) == stored;
    }

  // chunking must not matter
  std::size_t chunkings = 0, chunk_mismatch = 0;
  for (std::size_t chunk : {std::size_t{1}, std::size_t{2}, std::size_t{7}, std::size_t{64}, std::size_t{2065},
                            std::size_t{4099}, stream.size()}) {
    StreamDecoder dec;
    std::vector<DevicePacket> got;
    for (std::size_t off = 0; off < stream.size(); off += chunk) {
      const auto part = dec.feed(std::span(stream).subspan(off, std::min(chunk, stream.size() - off)));
      got.insert(got.end(), part.begin(), part.end());
    }
    ++chunkings;
    chunk_mismatch += got != packets || dec.crc_errors() != 0;
  }
  {
    StreamDecoder dec;
    std::vector<DevicePacket> got;
    for (std::size_t off = 0; off < stream.size();) {
      const std::size_t n = std::min<std::size_t>(1 + rng.below(5000), stream.size() - off);
      const auto part = dec.feed(std::span(stream).subspan(off, n));
      got.insert(got.end(), part.begin(), part.end());
      off += n;
    }
    ++chunkings;
    chunk_mismatch += got != packets;
  }
  Outcome o;
  o.need(round_trip_ok == kRoundTrips, "round-trip")
      .need(crc_misses == 0 && accepted == 0, "bit-flips")
      .need(chunk_mismatch == 0, "chunking");
  o.detail = str(round_trip_ok, "/", kRoundTrips, " round trips identical; ", flips, " single-bit flips of a Frame packet: ",
              flips - sync_flips - crc_misses, "/", flips - sync_flips, " CRC mismatches, ", sync_flips,
              " sync-marker flips, ", accepted, " packets accepted; ", chunkings - chunk_mismatch, "/", chunkings,
              " chunkings decode the same ", packets.size(), " packets");
  return o;
}

// ---------------------------------------------------------------- device

Outcome device_timing() {
  using namespace device;
  const auto sc = readout::Scenario{};
  std::string notes;
  bool rates_ok = true, collect_ok = true;

  auto stub = [](const core::TactileFrame&, const core::ImuSample&) { return InferencePayload{}; };
  const std::vector<TimedCommand> start{{0, kCmdStart}};
  constexpr std::uint64_t kSeconds = 10;

  // per-second counts over a 10 s window
  for (auto [mode, kind, rate] : {std::tuple{Mode::Visualize, PacketKind::Frame, 10}, {Mode::Infer, PacketKind::Inference, 8}}) {
    ScanSource src(sc.grid(), sc.adc, readout::ScanMode::Isolated, 1);
    const auto t = run_session({mode, kSdramFrames, {}}, src, stub, start, kSeconds * 1'000'000);
    std::vector<std::size_t> per_second(kSeconds, 0);
    for (const auto& p : t.packets)
      if (p.packet.kind == kind && p.t_us > 0) ++per_second[(p.t_us - 1) / 1'000'000];
    const bool even = std::all_of(per_second.begin(), per_second.end(), [&](auto n) { return n == std::size_t(rate); });
    rates_ok = rates_ok && even;
    notes += str(to_string(kind), " ", t.count(kind), " in ", kSeconds, " s", even ? "" : " (uneven)", "; ");
  }
  {
    ScanSource src(sc.grid(), sc.adc, readout::ScanMode::Isolated, 1);
    Device dev({Mode::Collect, kSdramFrames, {}}, src);
    dev.handle_command(kCmdStart, 0);
    std::size_t bad_seconds = 0;
    for (std::uint64_t s = 1; s <= kSeconds; ++s) {
      dev.tick(s * 1'000'000);
      bad_seconds += dev.buffer().used() != 100 * s;
    }
    rates_ok = rates_ok && bad_seconds == 0;
    notes += str("collect buffered ", dev.buffer().used(), " in ", kSeconds, " s; ");
  }
  for (std::size_t target : {std::size_t{100}, std::size_t{4096}, std::size_t{5000}}) {
    ScanSource src(sc.grid(), sc.adc, readout::ScanMode::Isolated, 1);
    const auto t = run_session({Mode::Collect, target, {}}, src, stub, start, 45'000'000);
    const std::size_t expect = std::min(target, kSdramFrames);
    std::uint64_t last = 0;
    for (const auto& p : t.packets)
      if (p.packet.kind == PacketKind::Dump) last = std::get<FramePayload>(p.packet.payload).timestamp_us;
    const std::uint64_t want_last = expect * 10'000;
    const bool good = t.count(PacketKind::Dump) == expect && last == want_last && t.final_state == DeviceState::Idle;
    collect_ok = collect_ok && good;
    notes += str("target ", target, " -> ", t.count(PacketKind::Dump), " dumped, last at ",
                 std::setprecision(6), double(last) / 1e6, " s", good ? "" : " (wrong)", "; ");
  }
  notes.resize(notes.size() - 2);
  Outcome o;
  o.need(rates_ok, "rates").need(collect_ok, "collect");
  o.detail = notes;
  return o;
}

// ---------------------------------------------------------------- kernels

Outcome kernels() {
  Rng rng(2718);
  double conv_err = 0, fc_err = 0, pool_err = 0, bn_err = 0, soft_err = 0, q15_err = 0, bn_peak = 0;
  for (int n = 0; n < kKernelCases; ++n) {
    // conv with weights at the usual fan-in scale
    const std::size_t k = std::array<std::size_t, 3>{1, 3, 5}[rng.below(3)];
    const ConvGeometry geom{1 + rng.below(8), k, 1 + rng.below(2), rng.below(k / 2 + 1)};
    const Shape in{1 + rng.below(8), k + rng.below(12), k + rng.below(12)};
    const double bound = std::sqrt(3.0 / double(in.c * k * k));
    const Tensor x(in, uniform_vec(rng, in.size(), -1, 1));
    const auto w = uniform_vec(rng, geom.out_channels * in.c * k * k, -bound, bound);
    const auto b = uniform_vec(rng, geom.out_channels, -0.5, 0.5);
    const auto want = test::oracle_conv(test::to_double(x.data), {in.c, in.h, in.w}, test::to_double(w),
                                        test::to_double(b), geom.out_channels, k, geom.stride, geom.pad);
    const Tensor y = conv2d(x, w, b, geom);
    std::vector<float> ys(y.data.size());
    serial::conv2d(x.data, in, w, b, geom, ys);
    conv_err = std::max({conv_err, test::max_abs_diff(want, y.data), test::max_abs_diff(want, ys)});

    // BN folded into that conv
    BatchNormParams bn{uniform_vec(rng, geom.out_channels, 0.5, 2.0), uniform_vec(rng, geom.out_channels, -0.5, 0.5),
                       uniform_vec(rng, geom.out_channels, -0.5, 0.5), uniform_vec(rng, geom.out_channels, 0.25, 2.0),
                       1e-5f};
    const auto folded = batchnorm_fold(bn, w, b);
    const auto out_shape = geom.output_shape(in);
    const auto bn_want = test::oracle_bn(want, {out_shape.c, out_shape.h, out_shape.w}, test::to_double(bn.gamma),
                                         test::to_double(bn.beta), test::to_double(bn.mean), test::to_double(bn.var),
                                         bn.eps);
    bn_err = std::max(bn_err, test::max_abs_diff(bn_want, conv2d(x, folded.weights, folded.bias, geom).data));
    for (double v : bn_want) bn_peak = std::max(bn_peak, std::fabs(v));

    // Q15 conv against F32
    const float out_scale = power_of_two_scale(y.data);
    const Tensor back = dequantize(conv2d_q15(quantize_q15(x, 1.0f), w, b, geom, out_scale));
    for (std::size_t i = 0; i < y.data.size(); ++i) q15_err = std::max(q15_err, double(std::fabs(back.data[i] - y.data[i])));

    // FC
    const std::size_t fi = 1 + rng.below(64), fo = 1 + rng.below(40);
    const double fb = std::sqrt(3.0 / double(fi));
    const Tensor v(Shape{fi}, uniform_vec(rng, fi, -1, 1));
    const auto fw = uniform_vec(rng, fi * fo, -fb, fb), fbias = uniform_vec(rng, fo, -0.5, 0.5);
    const Tensor fy = fully_connected(v, fw, fbias, fo);
    fc_err = std::max(fc_err, test::max_abs_diff(test::oracle_fc(test::to_double(v.data), test::to_double(fw),
                                                                 test::to_double(fbias)),
                                                 fy.data));
    const Tensor fq = dequantize(fully_connected_q15(quantize_q15(v, 1.0f), fw, fbias, fo, power_of_two_scale(fy.data)));
    for (std::size_t i = 0; i < fo; ++i) q15_err = std::max(q15_err, double(std::fabs(fq.data[i] - fy.data[i])));

    // pools
    const Shape ps{1 + rng.below(6), 2 + rng.below(16), 2 + rng.below(16)};
    const Tensor px(ps, uniform_vec(rng, ps.size(), -3, 3));
    pool_err = std::max({pool_err, test::max_abs_diff(test::oracle_maxpool(test::to_double(px.data), {ps.c, ps.h, ps.w}, 2),
                                                      maxpool2(px).data),
                         test::max_abs_diff(test::oracle_gap(test::to_double(px.data), {ps.c, ps.h, ps.w}),
                                            global_avg_pool(px).data)});

    // softmax
    const std::size_t len = 1 + rng.below(30);
    const Tensor z(Shape{len}, uniform_vec(rng, len, -20, 20));
    soft_err = std::max(soft_err, test::max_abs_diff(test::oracle_softmax(test::to_double(z.data)), softmax(z).data));
  }

  // residual block whose conv path is zeroed reduces to ReLU of the shortcut
  const auto g = reference_graph();
  auto records = random_weights(g, 31).records();
  for (auto& r : records)
    if (r.name.rfind("b1_conv", 0) == 0 || r.name == "b1_bn2.weight" || r.name == "b1_bn2.bias")
      r.data = std::vector<float>(r.count(), 0.0f);
  const Model model(g, WeightStore(records));
  InferenceContext ctx(model);
  std::vector<Tensor> seen(g.size());
  ctx.set_observer([&](std::size_t i, const Tensor& t) { seen[i] = t; });
  core::TactileFrame frame;
  for (auto& v : frame.values) v = static_cast<std::uint16_t>(rng.below(core::kAdcMax + 1));
  ctx.run(frame);
  const auto& pool = seen[*g.find("pool")];
  const auto& block = seen[*g.find("b1_out")];
  std::size_t identity_miss = 0;
  for (std::size_t i = 0; i < pool.data.size(); ++i) identity_miss += block.data[i] != std::max(0.0f, pool.data[i]);

  Outcome o;
  o.need(conv_err <= kKernelTol, "conv")
      .need(fc_err <= kKernelTol, "fc")
      .need(pool_err <= kKernelTol, "pool")
      .need(bn_err <= kKernelTol, "bn-fold")
      .need(soft_err <= kKernelTol, "softmax")
      .need(q15_err <= kQ15Tol, "q15")
      .need(identity_miss == 0, "residual");
  o.detail = str(kKernelCases, " cases each, max |err| vs double oracles: conv ", conv_err, ", fc ", fc_err, ", pool ",
              pool_err, ", bn-fold ", bn_err, " at |y| up to ", bn_peak,
              " (float32 spacing there ", std::nextafter(float(bn_peak), INFINITY) - float(bn_peak), "), softmax ", soft_err, " (<= ", kKernelTol, "); Q15 conv/fc ", q15_err,
              " (<= ", kQ15Tol, "); zeroed residual path: ", identity_miss, " mismatches");
  return o;
}

// ---------------------------------------------------------------- goldens

Outcome golden_parity() {
  double layer_err = 0, logit_err = 0;
  std::size_t total = 0, top1 = 0, q15_top1 = 0, layer_frames = 0;
  for (const char* stem : {"reference", "reference_imu"}) {
    const auto graph = ModelGraph::load(kData / (std::string(stem) + ".graph"));
    const auto weights = WeightStore::load(kFixtures / (std::string(stem) + ".shw1"));
    const auto goldens = load_goldens(kFixtures / (std::string(stem) + ".shga"));
    const Model model(graph, weights, {.fold_batchnorm = false});
    InferenceContext ctx(model);
    std::map<std::string, Tensor> seen;
    ctx.set_observer([&](std::size_t i, const Tensor& t) { seen[graph.layer(i).name] = t; });

    const Model folded(graph, weights);
    std::vector<InferenceInput> calib;
    for (std::size_t i = 0; i < goldens.size() / 4; ++i) calib.push_back({&goldens[i].frame, goldens[i].imu});
    InferenceContext q(folded, calibrate_q15(folded, calib));

    for (const auto& g : goldens) {
      seen.clear();
      const auto r = ctx.run(g.frame, g.imu);
      const auto& want = g.logits.data;
      const auto argmax = std::size_t(std::max_element(want.begin(), want.end()) - want.begin());
      for (std::size_t i = 0; i < want.size(); ++i) logit_err = std::max(logit_err, double(std::fabs(r.logits[i] - want[i])));
      top1 += r.top1() == argmax;
      q15_top1 += q.run(g.frame, g.imu).top1() == argmax;
      ++total;
      layer_frames += !g.layers.empty();
      for (const auto& [name, t] : g.layers) {
        const auto& got = seen.at(name);
        if (got.data.size() != t.data.size()) {
          layer_err = INFINITY;
          continue;
        }
        for (std::size_t i = 0; i < t.data.size(); ++i)
          layer_err = std::max(layer_err, double(std::fabs(got.data[i] - t.data[i])));
      }
    }
  }
  const double agree = double(q15_top1) / double(total);
  Outcome o;
  o.need(layer_err <= kGoldenTol && layer_frames >= 20, "layers")
      .need(logit_err <= kGoldenTol, "logits")
      .need(top1 == total, "top1")
      .need(agree >= kQ15Agreement, "q15");
  o.detail = str(total, " golden frames (", layer_frames, " with per-layer activations): layer max |err| ", layer_err,
              ", logits ", logit_err, " (<= ", kGoldenTol, "); top-1 ", top1, "/", total, "; Q15 argmax agreement ",
              agree * 100, "% (>= ", kQ15Agreement * 100, "%)");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<std::string> only, expect_fail;
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {"macc-budget", "MACC budget", macc_budget},
      {"flash-budget", "Flash budget", flash_budget},
      {"arena-planner", "Arena planner", arena_planner},
      {"latency", "Desk-scale latency", latency},
      {"ghosting", "Ghosting demonstration", ghosting},
      {"protocol", "Protocol robustness", protocol},
      {"device-timing", "Device timing", device_timing},
      {"kernels", "Kernel correctness", kernels},
      {"golden-parity", "Golden parity", golden_parity},
  };
  std::set<std::string> known;
  for (const auto& c : criteria) known.insert(c.id);
  auto criterion_of = [](const std::string& check) { return check.substr(0, check.find('.')); };
  for (const auto& id : only)
    if (!known.count(id)) return std::cerr << "unknown criterion " << id << '\n', 2;
  for (const auto& id : expect_fail)
    if (!known.count(criterion_of(id)) || id.find('.') == std::string::npos)
      return std::cerr << "--expect-fail takes <criterion>.<check>, got " << id << '\n', 2;

  auto selected = [&](const std::string& id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  std::set<std::string> failed;
  std::size_t run = 0, passed = 0;
  for (const auto& c : criteria) {
    if (!selected(c.id)) continue;
    ++run;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.failed = {"threw"};
      o.detail = std::string("threw: ") + e.what();
    }
    passed += o.pass();
    std::cout << (o.pass() ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title << ": " << o.detail;
    if (!o.pass()) {
      std::cout << "  -- failed:";
      for (const auto& part : o.failed) {
        std::cout << ' ' << c.id << '.' << part;
        failed.insert(c.id + "." + part);
      }
    }
    std::cout << '\n';
  }
  std::cout << passed << "/" << run << " criteria pass\n";

  std::set<std::string> expected;
  for (const auto& id : expect_fail)
    if (selected(criterion_of(id))) expected.insert(id);
  if (failed == expected) {
    if (!expected.empty()) std::cout << "failing checks match the expected list\n";
    return 0;
  }
  for (const auto& id : failed)
    if (!expected.count(id)) std::cout << "unexpected failure: " << id << '\n';
  for (const auto& id : expected)
    if (!failed.count(id)) std::cout << "expected to fail but passed: " << id << '\n';
  return 1;
}
