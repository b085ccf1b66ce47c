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

#include <benchmark/benchmark.h>

#include "smarthand/nn/engine.hpp"
#include "smarthand/nn/q15.hpp"
#include "smarthand/readout/scenario.hpp"
#include "smarthand/rng.hpp"

using namespace smarthand;
using namespace smarthand::nn;

namespace {

std::vector<float> random_vec(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
  return v;
}

// args: channels, spatial size, stride
struct ConvSetup {
  Shape in;
  ConvGeometry geom;
  std::vector<float> x, w, b, y;

  explicit ConvSetup(const benchmark::State& st) {
    const auto c = static_cast<std::size_t>(st.range(0)), hw = static_cast<std::size_t>(st.range(1));
    in = {c, hw, hw};
    geom = {c, 3, static_cast<std::size_t>(st.range(2)), 1};
    x = random_vec(in.size(), 1);
    w = random_vec(c * c * 9, 2, -0.1, 0.1);
    b = random_vec(c, 3);
    y.resize(geom.output_shape(in).size());
  }
  double macc() const { return double(geom.macc(in)); }
};

void conv_args(benchmark::internal::Benchmark* b) {
  b->Args({16, 32, 1})->Args({16, 16, 1})->Args({32, 8, 1});
}

void BM_ConvSerial(benchmark::State& st) {
  ConvSetup s(st);
  for (auto _ : st) {
    serial::conv2d(s.x, s.in, s.w, s.b, s.geom, s.y);
    benchmark::DoNotOptimize(s.y.data());
  }
  st.counters["MACC/s"] = benchmark::Counter(s.macc(), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ConvSerial)->Apply(conv_args);

void BM_ConvOmp(benchmark::State& st) {
  ConvSetup s(st);
  for (auto _ : st) {
    conv2d(s.x, s.in, s.w, s.b, s.geom, s.y);
    benchmark::DoNotOptimize(s.y.data());
  }
  st.counters["MACC/s"] = benchmark::Counter(s.macc(), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ConvOmp)->Apply(conv_args);

struct QConvSetup : ConvSetup {
  QuantizedLinear layer;
  std::vector<std::int16_t> qx, qy;

  explicit QConvSetup(const benchmark::State& st) : ConvSetup(st) {
    layer = quantize_linear(w, b, 1.0f, 8.0f);
    qx.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) qx[i] = quantize_q15(x[i], 1.0f);
    qy.resize(y.size());
  }
};

void BM_ConvQ15Serial(benchmark::State& st) {
  QConvSetup s(st);
  for (auto _ : st) {
    serial::conv2d_q15(s.qx, s.in, s.layer, s.geom, s.qy);
    benchmark::DoNotOptimize(s.qy.data());
  }
  st.counters["MACC/s"] = benchmark::Counter(s.macc(), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ConvQ15Serial)->Apply(conv_args);

void BM_ConvQ15Omp(benchmark::State& st) {
  QConvSetup s(st);
  for (auto _ : st) {
    conv2d_q15(s.qx, s.in, s.layer, s.geom, s.qy);
    benchmark::DoNotOptimize(s.qy.data());
  }
  st.counters["MACC/s"] = benchmark::Counter(s.macc(), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_ConvQ15Omp)->Apply(conv_args);

void BM_Inference(benchmark::State& st) {
  const Model model(reference_graph(), random_weights(reference_graph(), 7));
  core::TactileFrame frame;
  Rng rng(3);
  for (auto& v : frame.values) v = static_cast<std::uint16_t>(rng.below(core::kAdcMax + 1));
  std::optional<InferenceContext> ctx;
  if (st.range(0) == 0) {
    ctx.emplace(model);
  } else {
    const InferenceInput in{&frame, std::nullopt};
    ctx.emplace(model, calibrate_q15(model, std::span(&in, 1)));
  }
  for (auto _ : st) benchmark::DoNotOptimize(ctx->run(frame));
  st.SetLabel(st.range(0) == 0 ? "f32" : "q15");
  st.counters["MACC/s"] =
      benchmark::Counter(double(count_macc(model.graph())), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Inference)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

const readout::Scenario& ghost_scenario() {
  static const auto sc = readout::parse_scenario("law 50000 500 1\nadc 10000\npress 2 3 98\npress 2 7 98\npress 5 3 98\n");
  return sc;
}

void BM_ScanSerial(benchmark::State& st) {
  const auto& sc = ghost_scenario();
  const auto grid = sc.grid();
  for (auto _ : st) benchmark::DoNotOptimize(readout::serial::scan(grid, sc.adc, readout::ScanMode::NonIsolated));
}
BENCHMARK(BM_ScanSerial)->Unit(benchmark::kMillisecond);

void BM_ScanOmp(benchmark::State& st) {
  const auto& sc = ghost_scenario();
  const auto grid = sc.grid();
  for (auto _ : st) benchmark::DoNotOptimize(readout::scan(grid, sc.adc, readout::ScanMode::NonIsolated));
}
BENCHMARK(BM_ScanOmp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
