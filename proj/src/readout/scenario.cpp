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

#include "smarthand/readout/scenario.hpp"

#include <sstream>
#include <string>

#include "smarthand/binary_io.hpp"
#include "smarthand/error.hpp"

namespace smarthand::readout {

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    const auto bad = [&] {
      return Error(ErrorKind::FileFormat, "scenario line " + std::to_string(lineno) + ": malformed '" + word + "'");
    };
    if (word == "press") {
      long long r = 0, c = 0;
      double f = 0.0;
      if (!(ls >> r >> c >> f)) throw bad();
      if (r < 0 || c < 0) throw Error(ErrorKind::OutOfRange, "press outside 32x32 grid");
      sc.presses.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), f});
    } else if (word == "law") {
      if (!(ls >> sc.law.r_open_ohm >> sc.law.r_min_ohm >> sc.law.f0_newton)) throw bad();
    } else if (word == "adc") {
      if (!(ls >> sc.adc.r_ref_ohm)) throw bad();
    } else if (word == "wire") {
      if (!(ls >> sc.adc.wire_ohm)) throw bad();
    } else {
      throw Error(ErrorKind::FileFormat, "scenario line " + std::to_string(lineno) + ": unknown directive '" + word + "'");
    }
    std::string extra;
    if (ls >> extra) throw bad();
  }
  sc.law.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_scenario(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace smarthand::readout
