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

#include <filesystem>
#include <string_view>
#include <vector>

#include "smarthand/readout/readout.hpp"

namespace smarthand::readout {

// Text scenario, one directive per line, '#' starts a comment:
//   law <r_open_ohm> <r_min_ohm> <f0_newton>
//   adc <r_ref_ohm>
//   wire <series_ohm>
//   press <row> <col> <force_newton>
struct Scenario {
  FsrLaw law;
  AdcModel adc;
  std::vector<Press> presses;

  ResistorGrid grid() const { return frame_from_press_map(presses, law); }
};

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace smarthand::readout
