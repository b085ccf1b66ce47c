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

#include "smarthand/nn/weights.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "smarthand/error.hpp"
#include "smarthand/rng.hpp"

namespace smarthand::nn {
namespace {

std::string dims_str(const std::vector<std::uint32_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
  return s + "]";
}

std::vector<std::uint32_t> tensor_dims(const Shape& s) {
  if (s.is_vector()) return {static_cast<std::uint32_t>(s.c)};
  return {static_cast<std::uint32_t>(s.c), static_cast<std::uint32_t>(s.h), static_cast<std::uint32_t>(s.w)};
}

Shape dims_shape(const std::vector<std::uint32_t>& d) {
  if (d.size() == 1) return {d[0], 1, 1};
  if (d.size() == 3) return {d[0], d[1], d[2]};
  if (d.size() == 2 && d[0] == 32 && d[1] == 32) return {1, 32, 32};
  throw Error(ErrorKind::FileFormat, "golden tensor must be 1-d or 3-d");
}

std::string sample_prefix(std::size_t i) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

}  // namespace

WeightStore::WeightStore(std::vector<Record> records) {
  for (auto& r : records) add(std::move(r));
}

void WeightStore::add(Record record) {
  if (find(record.name)) throw Error(ErrorKind::WeightMismatch, "duplicate parameter '" + record.name + "'");
  records_.push_back(std::move(record));
}

const Record* WeightStore::find(std::string_view name) const {
  for (const auto& r : records_)
    if (r.name == name) return &r;
  return nullptr;
}

const Record& WeightStore::at(std::string_view name) const {
  if (const auto* r = find(name)) return *r;
  throw Error(ErrorKind::WeightMismatch, "missing parameter '" + std::string(name) + "'");
}

std::size_t WeightStore::total_param_count() const {
  std::size_t n = 0;
  for (const auto& r : records_) n += r.count();
  return n;
}

std::size_t WeightStore::total_param_bytes() const {
  std::size_t n = 0;
  for (const auto& r : records_) n += r.byte_size();
  return n;
}

Bytes WeightStore::encode() const { return encode_records("SHW1", records_); }

WeightStore WeightStore::decode(std::span<const std::uint8_t> bytes) {
  return WeightStore(decode_records("SHW1", bytes));
}

void WeightStore::save(const std::filesystem::path& path) const { write_file(path, encode()); }

WeightStore WeightStore::load(const std::filesystem::path& path) { return decode(read_file(path)); }

std::vector<ParamSpec> expected_parameters(const ModelGraph& graph) {
  std::vector<ParamSpec> out;
  for (const auto& l : graph.layers()) {
    const auto u = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
    switch (l.kind) {
      case LayerKind::Conv: {
        const auto in_c = graph.layer(l.inputs[0]).output.c;
        out.push_back({l.name + ".weight", {u(l.out_channels), u(in_c), u(l.kernel), u(l.kernel)}});
        out.push_back({l.name + ".bias", {u(l.out_channels)}});
        break;
      }
      case LayerKind::BatchNorm: {
        const auto ch = u(l.output.c);
        for (const char* p : {".weight", ".bias", ".running_mean", ".running_var"}) out.push_back({l.name + p, {ch}});
        break;
      }
      case LayerKind::FullyConnected: {
        const auto in_c = graph.layer(l.inputs[0]).output.size();
        out.push_back({l.name + ".weight", {u(l.out_channels), u(in_c)}});
        out.push_back({l.name + ".bias", {u(l.out_channels)}});
        break;
      }
      default: break;
    }
  }
  return out;
}

void validate_weights(const ModelGraph& graph, const WeightStore& weights) {
  const auto specs = expected_parameters(graph);
  std::set<std::string> expected;
  for (const auto& spec : specs) {
    expected.insert(spec.name);
    const auto& rec = weights.at(spec.name);
    if (rec.dtype() != DType::F32) throw Error(ErrorKind::WeightMismatch, "parameter '" + spec.name + "' must be f32");
    if (rec.dims != spec.dims)
      throw Error(ErrorKind::WeightMismatch,
                  "parameter '" + spec.name + "' has shape " + dims_str(rec.dims) + ", graph needs " + dims_str(spec.dims));
  }
  for (const auto& r : weights.records())
    if (!expected.count(r.name)) throw Error(ErrorKind::WeightMismatch, "unexpected parameter '" + r.name + "'");
}

WeightStore random_weights(const ModelGraph& graph, std::uint64_t seed) {
  Rng rng(seed);
  WeightStore store;
  for (const auto& spec : expected_parameters(graph)) {
    std::size_t count = 1;
    for (auto d : spec.dims) count *= d;
    std::vector<float> v(count);
    const auto ends_with = [&](std::string_view suffix) {
      return spec.name.size() >= suffix.size() && spec.name.compare(spec.name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    const bool is_bn = [&] {
      const auto dot = spec.name.rfind('.');
      const auto idx = graph.find(std::string_view(spec.name).substr(0, dot));
      return idx && graph.layer(*idx).kind == LayerKind::BatchNorm;
    }();
    if (is_bn) {
      for (auto& x : v) {
        if (ends_with(".weight")) x = static_cast<float>(rng.uniform(0.8, 1.2));
        else if (ends_with(".bias")) x = static_cast<float>(rng.uniform(-0.1, 0.1));
        else if (ends_with(".running_mean")) x = static_cast<float>(rng.uniform(-0.1, 0.1));
        else x = static_cast<float>(rng.uniform(0.5, 1.5));
      }
    } else if (spec.dims.size() > 1) {
      std::size_t fan_in = 1;
      for (std::size_t d = 1; d < spec.dims.size(); ++d) fan_in *= spec.dims[d];
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
      for (auto& x : v) x = static_cast<float>(rng.uniform(-bound, bound));
    } else {
      for (auto& x : v) x = static_cast<float>(rng.uniform(-0.05, 0.05));
    }
    store.add(Record{spec.name, spec.dims, std::move(v)});
  }
  return store;
}

BatchNormParams batchnorm_params(const WeightStore& weights, const Layer& bn) {
  BatchNormParams p;
  p.gamma = weights.at(bn.name + ".weight").f32();
  p.beta = weights.at(bn.name + ".bias").f32();
  p.mean = weights.at(bn.name + ".running_mean").f32();
  p.var = weights.at(bn.name + ".running_var").f32();
  p.eps = bn.eps;
  return p;
}

Bytes encode_goldens(const std::vector<GoldenSample>& samples) {
  std::vector<Record> records;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const auto prefix = sample_prefix(i) + "/";
    records.push_back({prefix + "input", {32, 32}, std::vector<std::uint16_t>(s.frame.values.begin(), s.frame.values.end())});
    if (s.imu) records.push_back({prefix + "imu", {3}, std::vector<float>(s.imu->begin(), s.imu->end())});
    for (const auto& [name, t] : s.layers) records.push_back({prefix + "layer/" + name, tensor_dims(t.shape), t.data});
    records.push_back({prefix + "logits", tensor_dims(s.logits.shape), s.logits.data});
  }
  return encode_records("SHGA", records);
}

std::vector<GoldenSample> decode_goldens(std::span<const std::uint8_t> bytes) {
  std::vector<GoldenSample> samples;
  std::map<std::string, std::size_t> slot;
  for (auto& rec : decode_records("SHGA", bytes)) {
    const auto slash = rec.name.find('/');
    if (slash == std::string::npos) throw Error(ErrorKind::FileFormat, "golden record '" + rec.name + "' has no sample prefix");
    const auto prefix = rec.name.substr(0, slash);
    const auto field = rec.name.substr(slash + 1);
    auto [it, fresh] = slot.emplace(prefix, samples.size());
    if (fresh) samples.emplace_back();
    auto& s = samples[it->second];
    if (field == "input") {
      const auto* v = std::get_if<std::vector<std::uint16_t>>(&rec.data);
      if (!v || v->size() != core::kTaxels) throw Error(ErrorKind::FileFormat, "golden input must be 32x32 u16");
      std::copy(v->begin(), v->end(), s.frame.values.begin());
    } else if (field == "imu") {
      const auto& v = rec.f32();
      if (v.size() != 3) throw Error(ErrorKind::FileFormat, "golden imu must have 3 values");
      s.imu = std::array<float, 3>{v[0], v[1], v[2]};
    } else if (field.rfind("layer/", 0) == 0) {
      s.layers.emplace_back(field.substr(6), Tensor(dims_shape(rec.dims), rec.f32()));
    } else if (field == "logits") {
      s.logits = Tensor(dims_shape(rec.dims), rec.f32());
    } else {
      throw Error(ErrorKind::FileFormat, "unknown golden field '" + field + "'");
    }
  }
  return samples;
}

void save_goldens(const std::vector<GoldenSample>& samples, const std::filesystem::path& path) {
  write_file(path, encode_goldens(samples));
}

std::vector<GoldenSample> load_goldens(const std::filesystem::path& path) { return decode_goldens(read_file(path)); }

}  // namespace smarthand::nn
