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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smarthand/core/frame.hpp"
#include "smarthand/nn/graph.hpp"
#include "smarthand/nn/kernels.hpp"
#include "smarthand/nn/records.hpp"

namespace smarthand::nn {

// Parameter tensors keyed by "<layer>.<param>":
//   conv  <name>.weight [out,in,k,k]  <name>.bias [out]
//   bn    <name>.weight (gamma) <name>.bias (beta) <name>.running_mean <name>.running_var, all [ch]
//   fc    <name>.weight [out,in]      <name>.bias [out]
class WeightStore {
 public:
  WeightStore() = default;
  explicit WeightStore(std::vector<Record> records);

  void add(Record record);
  const Record* find(std::string_view name) const;
  // Throws WeightMismatch when absent.
  const Record& at(std::string_view name) const;
  const std::vector<Record>& records() const { return records_; }

  std::size_t total_param_count() const;
  std::size_t total_param_bytes() const;

  Bytes encode() const;
  static WeightStore decode(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static WeightStore load(const std::filesystem::path& path);

  friend bool operator==(const WeightStore&, const WeightStore&) = default;

 private:
  std::vector<Record> records_;
};

struct ParamSpec {
  std::string name;
  std::vector<std::uint32_t> dims;
};

std::vector<ParamSpec> expected_parameters(const ModelGraph& graph);

// Every expected parameter present with matching shape and dtype f32, and no
// extras. Throws WeightMismatch naming the first problem.
void validate_weights(const ModelGraph& graph, const WeightStore& weights);

// He-style random initialization with plausible batch-norm statistics.
WeightStore random_weights(const ModelGraph& graph, std::uint64_t seed);

BatchNormParams batchnorm_params(const WeightStore& weights, const Layer& bn);

// Golden activations exported by the training side for parity checks.
struct GoldenSample {
  core::TactileFrame frame;
  std::optional<std::array<float, 3>> imu;
  std::vector<std::pair<std::string, Tensor>> layers;  // may be empty
  Tensor logits;
};

Bytes encode_goldens(const std::vector<GoldenSample>& samples);
std::vector<GoldenSample> decode_goldens(std::span<const std::uint8_t> bytes);
void save_goldens(const std::vector<GoldenSample>& samples, const std::filesystem::path& path);
std::vector<GoldenSample> load_goldens(const std::filesystem::path& path);

}  // namespace smarthand::nn
