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

#include "smarthand/nn/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "smarthand/binary_io.hpp"
#include "smarthand/error.hpp"

namespace smarthand::nn {
namespace {

constexpr std::string_view kReferenceTrunk = R"(# Reduced residual classifier, single 1x32x32 tactile frame.
input   frame       shape=1x32x32
conv    conv1       out=16 k=3 stride=1 pad=1
bn      bn1
relu    relu1
conv    conv2       out=16 k=3 stride=1 pad=1
bn      bn2
relu    relu2
maxpool pool        size=2
# residual block 1: 16 -> 16 at 16x16, identity shortcut
conv    b1_conv1    out=16 k=3 stride=1 pad=1
bn      b1_bn1
relu    b1_relu1
conv    b1_conv2    out=16 k=3 stride=1 pad=1
bn      b1_bn2
add     b1_add      src=b1_bn2,pool
relu    b1_out
# residual block 2: 16 -> 32, stride 2 to 8x8, 1x1 projection shortcut
conv    b2_conv1    out=32 k=3 stride=2 pad=1
bn      b2_bn1
relu    b2_relu1
conv    b2_conv2    out=32 k=3 stride=1 pad=1
bn      b2_bn2
conv    b2_proj     out=32 k=1 stride=2 pad=0 src=b1_out
bn      b2_proj_bn
add     b2_add      src=b2_bn2,b2_proj_bn
relu    b2_out
gap     features
)";

constexpr std::string_view kReferenceHead = R"(fc      fc          out=17
softmax probs
)";

constexpr std::string_view kImuBranch = R"(# IMU branch: 3 -> 30 -> 3, concatenated to the pooled tactile features
input   imu         shape=3
fc      mlp_fc1     out=30
relu    mlp_relu
fc      mlp_fc2     out=3
concat  fused       src=features,mlp_fc2
)";

const std::string& reference_text(bool with_imu) {
  static const std::string plain = std::string(kReferenceTrunk) + std::string(kReferenceHead);
  static const std::string imu = std::string(kReferenceTrunk) + std::string(kImuBranch) + std::string(kReferenceHead);
  return with_imu ? imu : plain;
}

Error syntax(int lineno, const std::string& msg) {
  return Error(ErrorKind::FileFormat, "graph line " + std::to_string(lineno) + ": " + msg);
}

std::size_t parse_count(const std::string& s, int lineno) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw syntax(lineno, "expected a non-negative integer, got '" + s + "'");
  }
}

Shape parse_shape(const std::string& s, int lineno) {
  std::vector<std::size_t> dims;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, 'x')) dims.push_back(parse_count(part, lineno));
  if (dims.size() == 1) return {dims[0], 1, 1};
  if (dims.size() == 3) return {dims[0], dims[1], dims[2]};
  throw syntax(lineno, "shape must be N or CxHxW");
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(part);
  return out;
}

const std::map<std::string, LayerKind, std::less<>>& kind_table() {
  static const std::map<std::string, LayerKind, std::less<>> table{
      {"input", LayerKind::Input},         {"conv", LayerKind::Conv},       {"bn", LayerKind::BatchNorm},
      {"relu", LayerKind::Relu},           {"maxpool", LayerKind::MaxPool}, {"add", LayerKind::Add},
      {"gap", LayerKind::GlobalAvgPool},   {"concat", LayerKind::Concat},   {"fc", LayerKind::FullyConnected},
      {"softmax", LayerKind::Softmax}};
  return table;
}

std::string_view keyword(LayerKind kind) {
  for (const auto& [word, k] : kind_table())
    if (k == kind) return word;
  return "?";
}

Error shape_error(const Layer& l, const std::string& msg) {
  return Error(ErrorKind::ShapeMismatch, "layer '" + l.name + "': " + msg);
}

}  // namespace

std::string to_string(DType dtype) {
  switch (dtype) {
    case DType::F32: return "f32";
    case DType::Q15: return "q15";
    case DType::U16: return "u16";
  }
  return "?";
}

std::string Shape::str() const {
  if (is_vector()) return std::to_string(c);
  return std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w);
}

Tensor::Tensor(Shape s, std::vector<float> values) : shape(s), data(std::move(values)) {
  if (data.size() != shape.size())
    throw Error(ErrorKind::ShapeMismatch, "tensor data length does not match shape " + shape.str());
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Input: return "Input";
    case LayerKind::Conv: return "Conv";
    case LayerKind::BatchNorm: return "BatchNorm";
    case LayerKind::Relu: return "Relu";
    case LayerKind::MaxPool: return "MaxPool";
    case LayerKind::Add: return "ResidualAdd";
    case LayerKind::GlobalAvgPool: return "GlobalAvgPool";
    case LayerKind::Concat: return "Concat";
    case LayerKind::FullyConnected: return "FullyConnected";
    case LayerKind::Softmax: return "Softmax";
  }
  return "?";
}

ModelGraph ModelGraph::parse(std::string_view text) {
  std::vector<Layer> layers;
  std::map<std::string, std::size_t, std::less<>> index;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word, name;
    if (!(ls >> word)) continue;
    const auto kind_it = kind_table().find(word);
    if (kind_it == kind_table().end()) throw syntax(lineno, "unknown layer kind '" + word + "'");
    if (!(ls >> name) || name.find('=') != std::string::npos) throw syntax(lineno, "layer needs a name");
    if (index.count(name)) throw syntax(lineno, "duplicate layer name '" + name + "'");

    Layer l;
    l.kind = kind_it->second;
    l.name = name;
    std::vector<std::string> src;
    bool have_out = false, have_shape = false;
    std::string kv;
    while (ls >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw syntax(lineno, "expected key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      if (key == "src") {
        src = split_names(value);
      } else if (key == "from" && l.kind == LayerKind::Add) {
        if (layers.empty()) throw syntax(lineno, "'from' needs a preceding layer");
        src = {layers.back().name, value};
      } else if (key == "out" && (l.kind == LayerKind::Conv || l.kind == LayerKind::FullyConnected)) {
        l.out_channels = parse_count(value, lineno);
        have_out = true;
      } else if (key == "k" && l.kind == LayerKind::Conv) {
        l.kernel = parse_count(value, lineno);
      } else if (key == "stride" && l.kind == LayerKind::Conv) {
        l.stride = parse_count(value, lineno);
      } else if (key == "pad" && l.kind == LayerKind::Conv) {
        l.pad = parse_count(value, lineno);
      } else if (key == "size" && l.kind == LayerKind::MaxPool) {
        l.pool = parse_count(value, lineno);
      } else if (key == "eps" && l.kind == LayerKind::BatchNorm) {
        try {
          l.eps = std::stof(value);
        } catch (const std::exception&) {
          throw syntax(lineno, "bad eps");
        }
      } else if (key == "shape" && l.kind == LayerKind::Input) {
        l.output = parse_shape(value, lineno);
        have_shape = true;
      } else {
        throw syntax(lineno, "unexpected key '" + key + "' for " + word);
      }
    }

    if (l.kind == LayerKind::Input) {
      if (!have_shape) throw syntax(lineno, "input needs shape=");
      if (!src.empty()) throw syntax(lineno, "input takes no src");
    } else {
      if ((l.kind == LayerKind::Conv || l.kind == LayerKind::FullyConnected) && !have_out)
        throw syntax(lineno, word + " needs out=");
      if (src.empty()) {
        if (layers.empty()) throw syntax(lineno, "first layer must be an input");
        src = {layers.back().name};
      }
      for (const auto& s : src) {
        const auto it = index.find(s);
        if (it == index.end()) throw syntax(lineno, "unknown source layer '" + s + "'");
        l.inputs.push_back(it->second);
      }
    }
    index.emplace(l.name, layers.size());
    layers.push_back(std::move(l));
  }
  return from_layers(std::move(layers));
}

ModelGraph ModelGraph::load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

ModelGraph ModelGraph::from_layers(std::vector<Layer> layers) {
  ModelGraph g;
  g.layers_ = std::move(layers);
  g.infer_shapes();
  return g;
}

void ModelGraph::infer_shapes() {
  if (layers_.empty()) throw Error(ErrorKind::ShapeMismatch, "empty graph");
  inputs_.clear();
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto& l = layers_[i];
    for (auto in : l.inputs)
      if (in >= i) throw shape_error(l, "inputs must come from earlier layers");
    const auto arity = [&](std::size_t n) {
      if (l.inputs.size() != n) throw shape_error(l, "expects " + std::to_string(n) + " input(s)");
    };
    const auto in_shape = [&](std::size_t k) { return layers_[l.inputs[k]].output; };

    switch (l.kind) {
      case LayerKind::Input:
        arity(0);
        if (l.output.size() == 0) throw shape_error(l, "empty input shape");
        inputs_.push_back(i);
        break;
      case LayerKind::Conv: {
        arity(1);
        const auto s = in_shape(0);
        if (l.kernel == 0 || l.stride == 0 || l.out_channels == 0) throw shape_error(l, "zero-sized conv");
        if (s.h + 2 * l.pad < l.kernel || s.w + 2 * l.pad < l.kernel) throw shape_error(l, "kernel larger than input");
        l.output = {l.out_channels, (s.h + 2 * l.pad - l.kernel) / l.stride + 1,
                    (s.w + 2 * l.pad - l.kernel) / l.stride + 1};
        break;
      }
      case LayerKind::BatchNorm:
      case LayerKind::Relu:
      case LayerKind::Softmax:
        arity(1);
        l.output = in_shape(0);
        break;
      case LayerKind::MaxPool: {
        arity(1);
        const auto s = in_shape(0);
        if (l.pool == 0 || s.h < l.pool || s.w < l.pool) throw shape_error(l, "pool window larger than input");
        l.output = {s.c, s.h / l.pool, s.w / l.pool};
        break;
      }
      case LayerKind::Add:
        arity(2);
        if (!(in_shape(0) == in_shape(1)))
          throw shape_error(l, "operand shapes differ: " + in_shape(0).str() + " vs " + in_shape(1).str());
        l.output = in_shape(0);
        break;
      case LayerKind::GlobalAvgPool:
        arity(1);
        l.output = {in_shape(0).c, 1, 1};
        break;
      case LayerKind::Concat:
        if (l.inputs.size() < 2) throw shape_error(l, "concat needs at least two inputs");
        l.output = {0, 1, 1};
        for (std::size_t k = 0; k < l.inputs.size(); ++k) {
          if (!in_shape(k).is_vector()) throw shape_error(l, "concat joins vectors only");
          l.output.c += in_shape(k).c;
        }
        break;
      case LayerKind::FullyConnected:
        arity(1);
        if (!in_shape(0).is_vector()) throw shape_error(l, "fully connected input must be a vector");
        if (l.out_channels == 0) throw shape_error(l, "zero-width fc");
        l.output = {l.out_channels, 1, 1};
        break;
    }
  }
  if (inputs_.empty()) throw Error(ErrorKind::ShapeMismatch, "graph has no input");
  if (inputs_.size() > 2) throw Error(ErrorKind::ShapeMismatch, "graph has more than two inputs");
  if (!(layers_[inputs_[0]].output == Shape{1, 32, 32}))
    throw Error(ErrorKind::ShapeMismatch, "first input must be 1x32x32");
  if (inputs_.size() == 2 && !(layers_[inputs_[1]].output == Shape{3, 1, 1}))
    throw Error(ErrorKind::ShapeMismatch, "IMU input must be a 3-vector");
  if (!layers_.back().output.is_vector()) throw Error(ErrorKind::ShapeMismatch, "graph must end in a vector");
}

std::optional<std::size_t> ModelGraph::find(std::string_view name) const {
  for (std::size_t i = 0; i < layers_.size(); ++i)
    if (layers_[i].name == name) return i;
  return std::nullopt;
}

std::size_t ModelGraph::residual_add_count() const {
  return static_cast<std::size_t>(
      std::count_if(layers_.begin(), layers_.end(), [](const Layer& l) { return l.kind == LayerKind::Add; }));
}

std::vector<std::size_t> ModelGraph::consumers(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = i + 1; j < layers_.size(); ++j)
    for (auto in : layers_[j].inputs)
      if (in == i) {
        out.push_back(j);
        break;
      }
  return out;
}

std::string ModelGraph::to_text() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    out << keyword(l.kind) << ' ' << l.name;
    switch (l.kind) {
      case LayerKind::Input: out << " shape=" << l.output.str(); break;
      case LayerKind::Conv:
        out << " out=" << l.out_channels << " k=" << l.kernel << " stride=" << l.stride << " pad=" << l.pad;
        break;
      case LayerKind::FullyConnected: out << " out=" << l.out_channels; break;
      case LayerKind::MaxPool: out << " size=" << l.pool; break;
      case LayerKind::BatchNorm: out << " eps=" << l.eps; break;
      default: break;
    }
    const bool implicit = l.inputs.size() == 1 && i > 0 && l.inputs[0] == i - 1;
    if (!l.inputs.empty() && !implicit) {
      out << " src=";
      for (std::size_t k = 0; k < l.inputs.size(); ++k) out << (k ? "," : "") << layers_[l.inputs[k]].name;
    }
    out << '\n';
  }
  return out.str();
}

std::string_view reference_graph_text(bool with_imu) { return reference_text(with_imu); }

ModelGraph reference_graph(bool with_imu) { return ModelGraph::parse(reference_text(with_imu)); }

}  // namespace smarthand::nn
